use std::fmt;

/// One letter of a free-group word: generator index and exponent `±1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub sign: i8,
}

impl Letter {
    pub fn new(generator: usize, sign: i8) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        Self { generator, sign }
    }

    pub fn inverse(self) -> Self {
        Self::new(self.generator, -self.sign)
    }
}

/// A word in the free group on the cut generators, kept freely reduced by
/// the constructors that say so.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FreeWord {
    letters: Vec<Letter>,
}

impl FreeWord {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds the word and freely reduces it.
    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut w = Self { letters: Vec::new() };
        for l in letters {
            w.push(l);
        }
        w
    }

    /// Appends one letter, cancelling against the last one if inverse.
    pub fn push(&mut self, letter: Letter) {
        if self.letters.last() == Some(&letter.inverse()) {
            self.letters.pop();
        } else {
            self.letters.push(letter);
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Reduced product `self · other`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut w = self.clone();
        for &l in &other.letters {
            w.push(l);
        }
        w
    }

    /// Renders with the given generator names, e.g. `B1+ B2-`.
    pub fn render(&self, names: &[String]) -> String {
        if self.letters.is_empty() {
            return "e".to_string();
        }
        self.letters
            .iter()
            .map(|l| {
                let name = names
                    .get(l.generator)
                    .cloned()
                    .unwrap_or_else(|| format!("g{}", l.generator + 1));
                format!("{name}{}", if l.sign > 0 { '+' } else { '-' })
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.letters.iter().map(|l| l.generator + 1).max().unwrap_or(0))
            .map(|g| format!("B{}", g + 1))
            .collect();
        f.write_str(&self.render(&names))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_cancels_adjacent_inverses() {
        let a = Letter::new(0, 1);
        let b = Letter::new(1, 1);
        let w = FreeWord::from_letters([a, b, b.inverse(), a.inverse(), a]);
        assert_eq!(w.letters(), &[a]);
        assert_eq!(w.concat(&w.inverse()), FreeWord::empty());
        assert_eq!(w.to_string(), "B1+");
    }
}
