//! Constant angle expressions: numbers, `pi`, `+ - * /`, unary minus and
//! parentheses.

use std::f64::consts::PI;
use std::iter::Peekable;
use std::str::CharIndices;

pub(crate) fn eval(src: &str) -> Result<f64, String> {
    let mut p = Parser {
        src,
        chars: src.char_indices().peekable(),
    };
    let value = p.sum()?;
    p.skip_ws();
    match p.chars.peek() {
        None => Ok(value),
        Some(&(i, c)) => Err(format!("unexpected `{c}` at column {} of `{src}`", i + 1)),
    }
}

struct Parser<'a> {
    src: &'a str,
    chars: Peekable<CharIndices<'a>>,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.chars.next_if(|(_, c)| c.is_whitespace()).is_some() {}
    }

    fn sum(&mut self) -> Result<f64, String> {
        let mut acc = self.product()?;
        loop {
            self.skip_ws();
            match self.chars.peek() {
                Some((_, '+')) => {
                    self.chars.next();
                    acc += self.product()?;
                }
                Some((_, '-')) => {
                    self.chars.next();
                    acc -= self.product()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<f64, String> {
        let mut acc = self.unary()?;
        loop {
            self.skip_ws();
            match self.chars.peek() {
                Some((_, '*')) => {
                    self.chars.next();
                    acc *= self.unary()?;
                }
                Some((_, '/')) => {
                    self.chars.next();
                    acc /= self.unary()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<f64, String> {
        self.skip_ws();
        match self.chars.peek() {
            Some((_, '-')) => {
                self.chars.next();
                Ok(-self.unary()?)
            }
            Some((_, '+')) => {
                self.chars.next();
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<f64, String> {
        self.skip_ws();
        let Some(&(start, c)) = self.chars.peek() else {
            return Err(format!("unexpected end of expression `{}`", self.src));
        };
        if c == '(' {
            self.chars.next();
            let v = self.sum()?;
            self.skip_ws();
            return match self.chars.next() {
                Some((_, ')')) => Ok(v),
                _ => Err(format!("missing `)` in `{}`", self.src)),
            };
        }
        if c.is_ascii_alphabetic() {
            let mut end = start;
            while let Some((i, ch)) = self.chars.next_if(|(_, ch)| ch.is_ascii_alphanumeric() || *ch == '_') {
                end = i + ch.len_utf8();
            }
            let ident = &self.src[start..end];
            return match ident {
                "pi" => Ok(PI),
                _ => Err(format!("unknown identifier `{ident}`")),
            };
        }
        if c.is_ascii_digit() || c == '.' {
            let mut end = start;
            let mut prev = ' ';
            while let Some((i, ch)) = self.chars.next_if(|(_, ch)| {
                ch.is_ascii_digit() || *ch == '.' || *ch == 'e' || *ch == 'E'
                    || ((*ch == '-' || *ch == '+') && (prev == 'e' || prev == 'E'))
            }) {
                end = i + ch.len_utf8();
                prev = ch;
            }
            let text = &self.src[start..end];
            return text.parse::<f64>().map_err(|_| format!("bad number `{text}`"));
        }
        Err(format!("unexpected `{c}` at column {} of `{}`", start + 1, self.src))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals_and_pi() {
        assert_eq!(eval("0.25").unwrap(), 0.25);
        assert_eq!(eval("-pi/2").unwrap(), -PI / 2.0);
        assert_eq!(eval("3*pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(eval("1.5707963267948966e0").unwrap(), 1.5707963267948966);
        assert_eq!(eval("-2.5e-3").unwrap(), -2.5e-3);
        assert_eq!(eval("(1 + 2) * -3").unwrap(), -9.0);
        assert_eq!(eval(" 2 - 1 - 1 ").unwrap(), 0.0);
    }

    #[test]
    fn rejects_garbage() {
        assert!(eval("").is_err());
        assert!(eval("theta").is_err());
        assert!(eval("1 +").is_err());
        assert!(eval("(1").is_err());
        assert!(eval("1 2").is_err());
        assert!(eval("1..2").is_err());
    }
}
