//! The function mini-language of the job files.
//!
//! ```text
//! function := "exp" | "sin" | "cos"
//!           | "poly:" list                  a_0, a_1, ... of Σ a_m z^m
//!           | "ratio:" list "/" list        numerator / denominator coefficients
//!           | "chi:" ball (";" ball)*       indicator of the balls |(u, |v|) − (u0, v0)| < rho
//! list     := number ("," number)*
//! ball     := number "," number "," number  u0, v0, rho
//! ```
//!
//! Blanks between tokens are ignored.

use slicecalc_core::slice::IntrinsicFunction;

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("function {input:?}, position {position}: {message}")]
pub struct LangError {
    pub input: String,
    /// Character offset of the offending token.
    pub position: usize,
    pub message: String,
}

impl From<LangError> for CliError {
    fn from(e: LangError) -> Self {
        CliError::Parse(e.to_string())
    }
}

struct Cursor<'a> {
    input: &'a str,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(input: &'a str) -> Self {
        Cursor { input, chars: input.chars().collect(), pos: 0 }
    }

    fn error(&self, at: usize, message: impl Into<String>) -> LangError {
        LangError { input: self.input.to_string(), position: at, message: message.into() }
    }

    fn skip_blanks(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_blanks();
        if self.chars.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), LangError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(self.pos, format!("expected '{c}'")))
        }
    }

    fn word(&mut self) -> (usize, String) {
        self.skip_blanks();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_alphabetic()) {
            self.pos += 1;
        }
        (start, self.chars[start..self.pos].iter().collect())
    }

    fn number(&mut self) -> Result<f64, LangError> {
        self.skip_blanks();
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '+' | '-'))
        {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        if text.is_empty() {
            return Err(self.error(start, "expected a number"));
        }
        match text.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(self.error(start, format!("invalid number {text:?}"))),
        }
    }

    fn list(&mut self) -> Result<Vec<f64>, LangError> {
        let mut out = vec![self.number()?];
        while self.eat(',') {
            out.push(self.number()?);
        }
        Ok(out)
    }

    fn end(&mut self) -> Result<(), LangError> {
        self.skip_blanks();
        if self.pos < self.chars.len() {
            return Err(self.error(self.pos, format!("unexpected '{}'", self.chars[self.pos])));
        }
        Ok(())
    }
}

pub fn parse_function(input: &str) -> Result<IntrinsicFunction, CliError> {
    let mut c = Cursor::new(input);
    let (start, name) = c.word();
    let core = |c: &Cursor, r: slicecalc_core::Result<IntrinsicFunction>| {
        r.map_err(|e| CliError::from(c.error(start, e.to_string())))
    };
    let f = match name.as_str() {
        "exp" | "sin" | "cos" => {
            c.end()?;
            match name.as_str() {
                "exp" => IntrinsicFunction::exp(),
                "sin" => IntrinsicFunction::sin(),
                _ => IntrinsicFunction::cos(),
            }
        }
        "poly" => {
            c.expect(':')?;
            let coeffs = c.list()?;
            c.end()?;
            IntrinsicFunction::poly(&coeffs)
        }
        "ratio" => {
            c.expect(':')?;
            let num = c.list()?;
            c.expect('/')?;
            let den = c.list()?;
            c.end()?;
            core(&c, IntrinsicFunction::ratio(&num, &den))?
        }
        "chi" => {
            c.expect(':')?;
            let mut balls = Vec::new();
            loop {
                let u = c.number()?;
                c.expect(',')?;
                let v = c.number()?;
                c.expect(',')?;
                let rho = c.number()?;
                balls.push((u, v, rho));
                if !c.eat(';') {
                    break;
                }
            }
            c.end()?;
            core(&c, IntrinsicFunction::chi(&balls))?
        }
        "" => return Err(c.error(start, "expected a function name").into()),
        other => return Err(c.error(start, format!("unknown function {other:?}")).into()),
    };
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn at(z: f64, input: &str) -> f64 {
        parse_function(input).unwrap().eval_shadow(Complex64::new(z, 0.0)).unwrap().re
    }

    #[test]
    fn builtins_parse() {
        assert!((at(1.0, "exp") - 1f64.exp()).abs() < 1e-15);
        assert!((at(0.5, " sin ") - 0.5f64.sin()).abs() < 1e-15);
        assert!((at(0.5, "cos") - 0.5f64.cos()).abs() < 1e-15);
        assert_eq!(at(2.0, "poly:1,0,-2"), -7.0);
        assert_eq!(at(2.0, "poly: 1 , 0 , -2"), -7.0);
        assert_eq!(at(3.0, "ratio:1/0,1"), 1.0 / 3.0);
        assert_eq!(at(0.1, "chi:0,0,0.5"), 1.0);
        assert_eq!(at(2.0, "chi:0,0,0.5;2,0,0.1"), 1.0);
        assert_eq!(at(1.0, "poly:1e-1"), 0.1);
    }

    #[test]
    fn errors_carry_positions() {
        let cases = [
            ("", 0),
            ("tan", 0),
            ("poly", 4),
            ("poly:", 5),
            ("poly:1,,2", 7),
            ("poly:1,x", 7),
            ("ratio:1", 7),
            ("ratio:1/0", 0),
            ("chi:0,0", 7),
            ("exp 1", 4),
        ];
        for (input, position) in cases {
            let err = match parse_function(input) {
                Err(CliError::Parse(msg)) => msg,
                other => panic!("{input:?}: {other:?}"),
            };
            assert!(err.contains(&format!("position {position}:")), "{input:?}: {err}");
        }
    }
}
