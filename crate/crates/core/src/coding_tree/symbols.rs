use std::fmt;
use std::str::FromStr;

use super::CodingError;

/// A finite or eventually periodic symbol sequence `u v v v …`.
///
/// Symbols are stored 0-based; text uses 1-based digits. `121` is a finite
/// word, `12^` is `(12)^∞` and `1.12^` is `1 (12)^∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolSeq {
    prefix: Vec<u8>,
    period: Vec<u8>,
}

impl SymbolSeq {
    pub fn finite(word: Vec<u8>) -> Self {
        Self {
            prefix: word,
            period: Vec::new(),
        }
    }

    /// `prefix · period^∞`; `period` must be nonempty.
    pub fn eventually_periodic(prefix: Vec<u8>, period: Vec<u8>) -> Result<Self, CodingError> {
        if period.is_empty() {
            return Err(CodingError::Parse("empty period".into()));
        }
        Ok(Self { prefix, period })
    }

    pub fn prefix(&self) -> &[u8] {
        &self.prefix
    }

    pub fn period(&self) -> &[u8] {
        &self.period
    }

    pub fn is_finite(&self) -> bool {
        self.period.is_empty()
    }

    /// Length of the defined part, or `None` if infinite.
    pub fn len(&self) -> Option<usize> {
        self.is_finite().then_some(self.prefix.len())
    }

    pub fn is_empty(&self) -> bool {
        self.prefix.is_empty() && self.period.is_empty()
    }

    /// Symbol at position `k` (0-based), if defined.
    pub fn at(&self, k: usize) -> Option<u8> {
        if k < self.prefix.len() {
            Some(self.prefix[k])
        } else if self.period.is_empty() {
            None
        } else {
            Some(self.period[(k - self.prefix.len()) % self.period.len()])
        }
    }

    /// The first `n` symbols (fewer if the word is finite and shorter).
    pub fn take(&self, n: usize) -> Vec<u8> {
        (0..n).map_while(|k| self.at(k)).collect()
    }

    pub fn max_symbol(&self) -> Option<u8> {
        self.prefix.iter().chain(&self.period).copied().max()
    }

    /// Checks every symbol is below `d`.
    pub fn check_alphabet(&self, d: usize) -> Result<(), CodingError> {
        match self.max_symbol() {
            Some(s) if s as usize >= d => Err(CodingError::Parse(format!(
                "symbol {} outside alphabet 1..={d}",
                s + 1
            ))),
            _ => Ok(()),
        }
    }
}

fn digits(s: &str) -> Result<Vec<u8>, CodingError> {
    s.chars()
        .map(|c| match c.to_digit(10) {
            Some(v) if v >= 1 => Ok(v as u8 - 1),
            _ => Err(CodingError::Parse(format!("bad symbol `{c}`"))),
        })
        .collect()
}

impl FromStr for SymbolSeq {
    type Err = CodingError;

    fn from_str(s: &str) -> Result<Self, CodingError> {
        let s = s.trim();
        if let Some(body) = s.strip_suffix('^') {
            let (u, v) = match body.split_once('.') {
                Some((u, v)) => (digits(u)?, digits(v)?),
                None => (Vec::new(), digits(body)?),
            };
            Self::eventually_periodic(u, v)
        } else {
            if s.contains('.') {
                return Err(CodingError::Parse(format!("`{s}`: `.` needs a `^` tail")));
            }
            let w = digits(s)?;
            if w.is_empty() {
                return Err(CodingError::Parse("empty word".into()));
            }
            Ok(Self::finite(w))
        }
    }
}

impl fmt::Display for SymbolSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = |w: &[u8]| w.iter().map(|s| char::from(b'1' + s)).collect::<String>();
        if self.period.is_empty() {
            f.write_str(&text(&self.prefix))
        } else if self.prefix.is_empty() {
            write!(f, "{}^", text(&self.period))
        } else {
            write!(f, "{}.{}^", text(&self.prefix), text(&self.period))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let s: SymbolSeq = "121^".parse().unwrap();
        assert_eq!(s.take(7), vec![0, 1, 0, 0, 1, 0, 0]);
        assert_eq!(s.to_string(), "121^");
        let s: SymbolSeq = "11.2^".parse().unwrap();
        assert_eq!(s.take(5), vec![0, 0, 1, 1, 1]);
        assert_eq!(s.to_string(), "11.2^");
        let s: SymbolSeq = "212".parse().unwrap();
        assert_eq!(s.len(), Some(3));
        assert_eq!(s.at(3), None);
        for bad in ["", "^", "10", "1.2", "a^"] {
            assert!(bad.parse::<SymbolSeq>().is_err(), "{bad}");
        }
        assert!("13^".parse::<SymbolSeq>().unwrap().check_alphabet(2).is_err());
    }
}
