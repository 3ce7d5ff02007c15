//! Spec strings such as `eta^-6 th(1)^3 th(2)^2 th(3)^2 th(4) th(5) th(8)`.
//!
//! Grammar (whitespace and `*` separate factors):
//!
//! ```text
//! block   := named | factor*
//! named   := "thetaL4" | "thetaL4_1" | "thetaL4_2" | "thetaL6" | "thetaL6_1" | "thetaL6_2"
//! factor  := "eta" ("^" int)? | "th(" int ")" ("^" int)?
//! ```
//!
//! Exponents are those of the displayed product `η^e ∏ ϑ_a^m`.

use super::{NamedBlock, ThetaBlockSpec};
use crate::error::{Error, Result};

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_separators(&mut self) {
        while let Some(c) = self.rest().chars().next() {
            if c.is_whitespace() || c == '*' {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn int(&mut self) -> Result<i64> {
        let start = self.pos;
        let bytes = self.rest().as_bytes();
        let mut len = 0;
        if matches!(bytes.first(), Some(b'-') | Some(b'+')) {
            len = 1;
        }
        while len < bytes.len() && bytes[len].is_ascii_digit() {
            len += 1;
        }
        let text = &self.src[start..start + len];
        match text.parse::<i64>() {
            Ok(v) => {
                self.pos += len;
                Ok(v)
            }
            Err(_) => self.err("expected an integer"),
        }
    }

    fn exponent(&mut self) -> Result<i64> {
        if self.eat("^") {
            self.int()
        } else {
            Ok(1)
        }
    }
}

pub fn parse_block(src: &str) -> Result<ThetaBlockSpec> {
    let trimmed = src.trim();
    if let Some(named) = NamedBlock::from_name(trimmed) {
        return Ok(named.spec());
    }
    let mut cur = Cursor { src, pos: 0 };
    let mut eta = 0i64;
    let mut thetas: Vec<(Vec<i64>, i64)> = Vec::new();
    cur.skip_separators();
    if cur.rest().is_empty() {
        return cur.err("empty block");
    }
    while !cur.rest().is_empty() {
        if cur.eat("th(") {
            let a = cur.int()?;
            if !cur.eat(")") {
                return cur.err("expected `)`");
            }
            let m = cur.exponent()?;
            thetas.push((vec![a], m));
        } else if cur.eat("eta") {
            eta += cur.exponent()?;
        } else if cur.rest().starts_with("theta") {
            return cur.err("named lattice blocks cannot be combined with other factors");
        } else {
            return cur.err("expected `eta` or `th(`");
        }
        let before = cur.pos;
        cur.skip_separators();
        if cur.pos == before && !cur.rest().is_empty() {
            return cur.err("expected a separator between factors");
        }
    }
    Ok(ThetaBlockSpec::from_display(None, eta, thetas))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn parses_the_index_67_block() {
        let s = parse_block("eta^-6 th(1)^3 th(2)^2 th(3)^2 th(4) th(5) th(8)").unwrap();
        assert_eq!(s.raw_eta_power(), -6);
        assert_eq!(s.index(), Some(int(67)));
        assert_eq!(s.weight(), int(2));
        let t = parse_block("eta^-6 * th(8) th(1)^3 th(2)^2 th(3)^2 th(4) th(5)").unwrap();
        assert_eq!(t.index(), s.index());
    }

    #[test]
    fn bare_eta() {
        let s = parse_block("eta").unwrap();
        assert_eq!(s.eta_pow, 1);
        assert!(s.thetas.is_empty());
    }

    #[test]
    fn named_constant() {
        let s = parse_block("thetaL4").unwrap();
        assert_eq!(s.index(), Some(int(1)));
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse_block("eta th(2").unwrap_err(),
            Error::Parse {
                pos: 8,
                msg: "expected `)`".into()
            }
        );
        assert!(matches!(parse_block("eta^x"), Err(Error::Parse { pos: 4, .. })));
        assert!(matches!(parse_block("etath(1)"), Err(Error::Parse { pos: 3, .. })));
        assert!(matches!(parse_block("  "), Err(Error::Parse { .. })));
    }
}
