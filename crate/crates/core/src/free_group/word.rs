use std::fmt;

use crate::error::{Error, Result};

/// Largest rank expressible in the letter grammar (`a..z`).
pub const MAX_RANK: usize = 26;

/// A generator `x_i` or its inverse, stored as `+i` / `-i` with `i` in `1..=rank`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(transparent)]
pub struct Letter(i8);

impl Letter {
    /// `generator` is 1-based.
    pub fn new(generator: usize, inverse: bool) -> Letter {
        debug_assert!((1..=MAX_RANK).contains(&generator));
        let g = generator as i8;
        Letter(if inverse { -g } else { g })
    }

    pub fn from_signed(value: i64, rank: usize) -> Result<Letter> {
        if value == 0 || value.unsigned_abs() as usize > rank {
            return Err(Error::IndexOutOfRange { index: value, rank });
        }
        Ok(Letter(value as i8))
    }

    #[inline]
    pub fn signed(self) -> i8 {
        self.0
    }

    /// 1-based generator index.
    #[inline]
    pub fn generator(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    /// 0-based generator index, for table lookups.
    #[inline]
    pub fn index(self) -> usize {
        self.0.unsigned_abs() as usize - 1
    }

    #[inline]
    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    #[inline]
    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    pub fn to_char(self) -> char {
        let base = if self.is_inverse() { b'A' } else { b'a' };
        (base + self.index() as u8) as char
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'a'..='z' => Some(Letter::new((c as u8 - b'a') as usize + 1, false)),
            'A'..='Z' => Some(Letter::new((c as u8 - b'A') as usize + 1, true)),
            _ => None,
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// Appends `letter` to a reduced word held as a stack, cancelling against the top.
#[inline]
pub(crate) fn push_reduced(stack: &mut Vec<Letter>, letter: Letter) {
    if stack.last() == Some(&letter.inverse()) {
        stack.pop();
    } else {
        stack.push(letter);
    }
}

/// Bounds `[start, end)` of the cyclically reduced core of a reduced word.
#[inline]
pub(crate) fn cyclic_core(letters: &[Letter]) -> (usize, usize) {
    let (mut i, mut j) = (0, letters.len());
    while j - i >= 2 && letters[i] == letters[j - 1].inverse() {
        i += 1;
        j -= 1;
    }
    (i, j)
}

pub(crate) fn check_rank(rank: usize) -> Result<()> {
    if rank == 0 || rank > MAX_RANK {
        return Err(Error::InvalidRank(rank));
    }
    Ok(())
}

fn write_letters(f: &mut fmt::Formatter<'_>, letters: &[Letter]) -> fmt::Result {
    if letters.is_empty() {
        return f.write_str("1");
    }
    for l in letters {
        write!(f, "{}", l.to_char())?;
    }
    Ok(())
}

/// A freely reduced word in the free group of the given rank.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<Letter>,
    rank: usize,
}

impl Word {
    pub fn identity(rank: usize) -> Word {
        Word {
            letters: Vec::new(),
            rank,
        }
    }

    /// The 1-based generator `x_i` (or its inverse).
    pub fn generator(rank: usize, generator: usize, inverse: bool) -> Result<Word> {
        check_rank(rank)?;
        let letter = Letter::from_signed(generator as i64, rank)?;
        Ok(Word {
            letters: vec![if inverse { letter.inverse() } else { letter }],
            rank,
        })
    }

    /// Free reduction of a sequence of signed generator indices.
    pub fn reduce<I>(raw: I, rank: usize) -> Result<Word>
    where
        I: IntoIterator<Item = i64>,
    {
        check_rank(rank)?;
        let mut stack = Vec::new();
        for value in raw {
            push_reduced(&mut stack, Letter::from_signed(value, rank)?);
        }
        Ok(Word {
            letters: stack,
            rank,
        })
    }

    /// Free reduction of letters already known to be in range.
    pub fn from_letters<I>(letters: I, rank: usize) -> Result<Word>
    where
        I: IntoIterator<Item = Letter>,
    {
        check_rank(rank)?;
        let mut stack = Vec::new();
        for l in letters {
            if l.generator() > rank {
                return Err(Error::IndexOutOfRange {
                    index: l.signed() as i64,
                    rank,
                });
            }
            push_reduced(&mut stack, l);
        }
        Ok(Word {
            letters: stack,
            rank,
        })
    }

    /// Caller guarantees the letters are reduced and in range.
    pub(crate) fn from_reduced_unchecked(letters: Vec<Letter>, rank: usize) -> Word {
        debug_assert!(letters.windows(2).all(|p| p[0] != p[1].inverse()));
        Word { letters, rank }
    }

    pub fn rank(&self) -> usize {
        self.rank
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

    pub fn signed(&self) -> Vec<i64> {
        self.letters.iter().map(|l| l.signed() as i64).collect()
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
            rank: self.rank,
        }
    }

    /// Reduced product `self * other`.
    pub fn mul(&self, other: &Word) -> Result<Word> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: other.rank,
            });
        }
        let mut stack = self.letters.clone();
        for &l in &other.letters {
            push_reduced(&mut stack, l);
        }
        Ok(Word {
            letters: stack,
            rank: self.rank,
        })
    }

    /// `u * self * u^-1`.
    pub fn conjugate_by(&self, u: &Word) -> Result<Word> {
        u.mul(self)?.mul(&u.inverse())
    }

    /// Cyclically reduced representative of the conjugacy class.
    pub fn cyclic_reduce(&self) -> CyclicWord {
        let (i, j) = cyclic_core(&self.letters);
        CyclicWord {
            letters: self.letters[i..j].to_vec(),
            rank: self.rank,
        }
    }

    /// Conjugacy length `||g||`.
    pub fn conjugacy_len(&self) -> usize {
        let (i, j) = cyclic_core(&self.letters);
        j - i
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_letters(f, &self.letters)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word(")?;
        write_letters(f, &self.letters)?;
        write!(f, ")")
    }
}

/// A freely and cyclically reduced word; its length is the conjugacy length.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CyclicWord {
    letters: Vec<Letter>,
    rank: usize,
}

impl CyclicWord {
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn to_word(&self) -> Word {
        Word {
            letters: self.letters.clone(),
            rank: self.rank,
        }
    }
}

impl From<CyclicWord> for Word {
    fn from(c: CyclicWord) -> Word {
        Word {
            letters: c.letters,
            rank: c.rank,
        }
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_letters(f, &self.letters)
    }
}

impl fmt::Debug for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CyclicWord(")?;
        write_letters(f, &self.letters)?;
        write!(f, ")")
    }
}
