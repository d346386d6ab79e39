//! Text grammar for words and automorphisms.
//!
//! Words: `a..z` are generators, `A..Z` their inverses, `1` the empty word.
//! Automorphisms: `a-><word>; b-><word>; ... | a-><word>; b-><word>; ...`
//! where the part after `|` lists the images under the inverse.

use super::automorphism::Automorphism;
use super::word::{check_rank, Letter, Word};
use crate::error::{Error, Result};

fn parse_error(position: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        position,
        message: message.into(),
    }
}

fn parse_letters(text: &str, offset: usize) -> Result<Vec<Letter>> {
    let trimmed = text.trim();
    if trimmed == "1" {
        return Ok(Vec::new());
    }
    if trimmed.is_empty() {
        return Err(parse_error(offset, "empty word (write the identity as 1)"));
    }
    let mut out = Vec::with_capacity(trimmed.len());
    for (i, c) in text.char_indices() {
        if c.is_whitespace() {
            continue;
        }
        match Letter::from_char(c) {
            Some(l) => out.push(l),
            None => return Err(parse_error(offset + i, format!("unexpected character {c:?}"))),
        }
    }
    Ok(out)
}

/// Parses and freely reduces a word of the given rank.
pub fn parse_word(text: &str, rank: usize) -> Result<Word> {
    check_rank(rank)?;
    let letters = parse_letters(text, 0)?;
    Word::from_letters(letters, rank)
}

/// Parses `a->w1; b->w2; ...`, returning the images in generator order. The
/// rank is the number of clauses, which must name `a, b, ...` exactly once.
pub fn parse_substitution(text: &str) -> Result<Vec<Word>> {
    parse_substitution_at(text, 0)
}

fn parse_substitution_at(text: &str, offset: usize) -> Result<Vec<Word>> {
    let mut clauses = Vec::new();
    let mut pos = offset;
    for clause in text.split(';') {
        if !clause.trim().is_empty() {
            clauses.push((pos, clause));
        }
        pos += clause.len() + 1;
    }
    let rank = clauses.len();
    if rank == 0 {
        return Err(parse_error(offset, "no generator images"));
    }
    check_rank(rank).map_err(|_| parse_error(offset, format!("too many clauses ({rank})")))?;

    let mut slots: Vec<Option<Vec<Letter>>> = vec![None; rank];
    for (start, clause) in clauses {
        let arrow = clause
            .find("->")
            .ok_or_else(|| parse_error(start, "expected `->`"))?;
        let lhs = clause[..arrow].trim();
        let mut chars = lhs.chars();
        let gen = match (chars.next(), chars.next()) {
            (Some(c @ 'a'..='z'), None) => (c as u8 - b'a') as usize,
            _ => return Err(parse_error(start, format!("expected a lowercase generator, got {lhs:?}"))),
        };
        if gen >= rank {
            return Err(parse_error(
                start,
                format!("generator {lhs} outside rank {rank}"),
            ));
        }
        if slots[gen].is_some() {
            return Err(parse_error(start, format!("generator {lhs} given twice")));
        }
        slots[gen] = Some(parse_letters(&clause[arrow + 2..], start + arrow + 2)?);
    }
    slots
        .into_iter()
        .map(|letters| Word::from_letters(letters.expect("all slots filled"), rank))
        .collect()
}

/// Parses `images | inverse images` and verifies the inverse.
pub fn parse_automorphism(text: &str) -> Result<Automorphism> {
    let mut parts = text.splitn(3, '|');
    let forward = parts.next().unwrap_or_default();
    let backward = parts
        .next()
        .ok_or_else(|| parse_error(text.len(), "missing `|` and inverse images"))?;
    if parts.next().is_some() {
        return Err(parse_error(0, "more than one `|`"));
    }
    let images = parse_substitution_at(forward, 0)?;
    let inverse_images = parse_substitution_at(backward, forward.len() + 1)?;
    if images.len() != inverse_images.len() {
        return Err(Error::RankMismatch {
            left: images.len(),
            right: inverse_images.len(),
        });
    }
    Automorphism::new(images, inverse_images)
}

/// Builds an automorphism from separately given image and inverse-image strings.
pub fn parse_automorphism_parts(map: &str, inverse: &str) -> Result<Automorphism> {
    let images = parse_substitution(map)?;
    let inverse_images = parse_substitution(inverse)?;
    Automorphism::new(images, inverse_images)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_with_certified_inverse() {
        let phi = parse_automorphism("a->ab; b->a | a->b; b->Ba").unwrap();
        assert_eq!(phi.rank(), 2);
        assert_eq!(phi.to_string(), "a->ab; b->a | a->b; b->Ba");
    }

    #[test]
    fn identity_parses() {
        let id = parse_automorphism("a->a; b->b | a->a; b->b").unwrap();
        assert!(id.is_identity());
    }

    #[test]
    fn wrong_inverse_is_rejected() {
        let err = parse_automorphism("a->ab; b->a | a->a; b->b").unwrap_err();
        assert!(matches!(err, Error::InverseCheck { .. }), "{err}");
    }

    #[test]
    fn grammar_errors() {
        assert!(matches!(parse_word("ab?", 2), Err(Error::Parse { position: 2, .. })));
        assert!(matches!(parse_word("ac", 2), Err(Error::IndexOutOfRange { .. })));
        assert!(parse_automorphism("a->ab; b->a").is_err());
        assert!(parse_automorphism("a->ab; a->a | a->b; b->Ba").is_err());
        assert!(parse_automorphism("a->ab; b->1 | a->b; b->Ba").is_err());
        assert!(parse_automorphism("a->ab; b->a | a->b; b->Ba; c->c").is_err());
    }

    #[test]
    fn whitespace_and_identity_word() {
        assert_eq!(parse_word(" a b B a ", 2).unwrap().to_string(), "aa");
        assert!(parse_word("1", 3).unwrap().is_empty());
        let phi = parse_automorphism("a -> a b ;b->a|a->b;b->B a").unwrap();
        assert_eq!(phi.images()[0].to_string(), "ab");
    }
}
