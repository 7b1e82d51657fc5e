use super::UniPoly;
use crate::error::{Error, Result};
use crate::exact_arith::{int, parse_rational, Rational};

/// Parses a univariate polynomial in `t`, e.g. `t^3*(t-1/9)^2 - 2t + 0.5`.
///
/// Also accepts a bracketed coefficient list `[c0, c1, ...]`.
pub fn parse_poly(src: &str) -> Result<UniPoly> {
    let s = src.trim();
    if let Some(inner) = s.strip_prefix('[').and_then(|x| x.strip_suffix(']')) {
        let coeffs = inner
            .split(',')
            .map(|c| c.trim())
            .filter(|c| !c.is_empty())
            .map(|c| parse_rational(c.trim_matches('"')))
            .collect::<Result<Vec<_>>>()?;
        return Ok(UniPoly::new(coeffs));
    }
    let mut p = Parser {
        chars: s.chars().filter(|c| !c.is_whitespace()).collect(),
        pos: 0,
    };
    let out = p.expr()?;
    if p.pos != p.chars.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(out)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn error(&self, msg: &str) -> Error {
        Error::InvalidArgument(format!(
            "cannot parse polynomial at column {}: {msg}",
            self.pos + 1
        ))
    }

    fn expr(&mut self) -> Result<UniPoly> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                '+' => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                '-' => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<UniPoly> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = &acc * &self.power()?;
                }
                Some('/') => {
                    self.pos += 1;
                    let d = self.power()?;
                    let c = match d.degree() {
                        Some(0) => d.coeff(0),
                        _ => return Err(self.error("division by a nonconstant")),
                    };
                    acc = acc.scale(&c.recip());
                }
                // implicit product such as `2t` or `t(t-1)`
                Some(c) if c == 't' || c == '(' || c.is_ascii_digit() => {
                    acc = &acc * &self.power()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<UniPoly> {
        let base = self.unary()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let start = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            let e: u32 = self.chars[start..self.pos]
                .iter()
                .collect::<String>()
                .parse()
                .map_err(|_| self.error("expected exponent"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<UniPoly> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(-&self.power()?)
            }
            Some('+') => {
                self.pos += 1;
                self.power()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<UniPoly> {
        match self.peek() {
            Some('t') | Some('x') => {
                self.pos += 1;
                Ok(UniPoly::x())
            }
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
                    self.pos += 1;
                }
                let lit: String = self.chars[start..self.pos].iter().collect();
                let r: Rational = parse_rational(&lit)?;
                Ok(UniPoly::constant(r))
            }
            _ => Err(self.error("expected `t`, a number or `(`")),
        }
    }
}

/// Renders a polynomial in the syntax accepted by [`parse_poly`].
pub fn format_poly(p: &UniPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, c) in p.coeffs().iter().enumerate() {
        if *c == int(0) {
            continue;
        }
        let neg = c < &int(0);
        let mag = if neg { -c.clone() } else { c.clone() };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let unit = mag == int(1);
        match i {
            0 => out.push_str(&mag.to_string()),
            _ => {
                if !unit {
                    out.push_str(&format!("{mag}*"));
                }
                out.push('t');
                if i > 1 {
                    out.push_str(&format!("^{i}"));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::rat;

    #[test]
    fn parses_products_and_powers() {
        let p = parse_poly("t^3*(t-1/9)^2*(t-1/3)").unwrap();
        assert_eq!(p.degree(), Some(6));
        assert_eq!(p.eval(&rat(1, 9)), int(0));
        assert_eq!(p.eval(&int(1)), rat(64, 81) * rat(2, 3));
        assert_eq!(
            parse_poly("2t - 0.5").unwrap(),
            UniPoly::new(vec![rat(-1, 2), int(2)])
        );
        assert_eq!(
            parse_poly("[0, 0, 1]").unwrap(),
            UniPoly::from_ints(&[0, 0, 1])
        );
        assert_eq!(parse_poly("-t^2").unwrap(), UniPoly::from_ints(&[0, 0, -1]));
        assert!(parse_poly("t^").is_err());
        assert!(parse_poly("1/t").is_err());
    }

    #[test]
    fn format_round_trips() {
        for s in ["t^3*(t-1/9)^2", "5", "-t + 1/3", "0"] {
            let p = parse_poly(s).unwrap();
            assert_eq!(parse_poly(&format_poly(&p)).unwrap(), p);
        }
    }
}
