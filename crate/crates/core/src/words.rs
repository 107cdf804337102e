//! Formal generator words and the levels `G_n` of the free semigroup.
//!
//! A word `(i_1, ..., i_m)` acts by applying `f_{i_1}` first and `f_{i_m}`
//! last. Level `n` holds every word of length `< n`, so `|G_n| = sum_{i<n} k^i`
//! even when two generators coincide.
//!
//! Orbit tables are laid out in length-lexicographic order: entry 0 is the
//! empty word and the children of entry `j` are `k j + 1 ..= k j + k`. With this
//! layout `G_m` is the prefix of length `|G_m|` of any deeper table, which is
//! what lets the packing code read every `d_m`, `m <= n`, off a single table.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::systems::{Point, System};

/// Default cap on materialized orbit tables.
pub const DEFAULT_ORBIT_CAP: u64 = 1_000_000;

/// `|G_n| = sum_{i=0}^{n-1} k^i`, with overflow reported instead of wrapped.
pub fn level_size(k: usize, n: usize) -> Result<u64> {
    if k == 0 || n == 0 {
        return Err(Error::InvalidArgument("level_size needs k >= 1 and n >= 1".into()));
    }
    let k64 = k as u64;
    let mut total: u64 = 0;
    let mut power: u64 = 1;
    for i in 0..n {
        total = total.checked_add(power).ok_or(Error::Overflow { k, n })?;
        if i + 1 < n {
            power = power.checked_mul(k64).ok_or(Error::Overflow { k, n })?;
        }
    }
    Ok(total)
}

/// A formal word; letters are zero-based generator indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<u32>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The word with its last (outermost) letter removed.
    pub fn parent(&self) -> Option<Word> {
        if self.0.is_empty() {
            None
        } else {
            Some(Word(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// Position in the length-lexicographic layout.
    pub fn table_index(&self, k: usize) -> usize {
        self.0.iter().fold(0usize, |idx, letter| idx * k + *letter as usize + 1)
    }

    pub fn from_table_index(mut idx: usize, k: usize) -> Word {
        let mut letters = Vec::new();
        while idx > 0 {
            letters.push(((idx - 1) % k) as u32);
            idx = (idx - 1) / k;
        }
        letters.reverse();
        Word(letters)
    }

    pub fn apply(&self, system: &System, p: &Point) -> Result<Point> {
        let mut q = p.clone();
        for letter in &self.0 {
            q = system.apply_generator(*letter as usize, &q)?;
        }
        Ok(q)
    }
}

/// Iterator over the words of `G_n`, shortest first, empty word first.
#[derive(Clone, Debug)]
pub struct WordLevel {
    k: usize,
    next: usize,
    end: usize,
}

impl WordLevel {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        let end = level_size(k, n)?;
        Ok(WordLevel { k, next: 0, end: end as usize })
    }
}

impl Iterator for WordLevel {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.next >= self.end {
            return None;
        }
        let w = Word::from_table_index(self.next, self.k);
        self.next += 1;
        Some(w)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = self.end - self.next;
        (r, Some(r))
    }
}

impl ExactSizeIterator for WordLevel {}

/// Images of one point under every word of `G_n`.
#[derive(Clone, Debug)]
pub struct OrbitTable {
    k: usize,
    depth: usize,
    images: Vec<Point>,
}

impl OrbitTable {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// All images in table order.
    pub fn images(&self) -> &[Point] {
        &self.images
    }

    /// Images of the words in `G_m`, `m <= depth`.
    pub fn level(&self, m: usize) -> Result<&[Point]> {
        if m == 0 || m > self.depth {
            return Err(Error::InvalidArgument("level outside the table depth".into()));
        }
        Ok(&self.images[..level_size(self.k, m)? as usize])
    }

    pub fn get(&self, word: &Word) -> Option<&Point> {
        if word.len() >= self.depth {
            return None;
        }
        self.images.get(word.table_index(self.k))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Word, &Point)> + '_ {
        self.images.iter().enumerate().map(|(i, p)| (Word::from_table_index(i, self.k), p))
    }
}

/// Builds the orbit table of `p` over `G_n`, refusing tables above `cap`.
pub fn orbit_images_capped(system: &System, p: &Point, n: usize, cap: u64) -> Result<OrbitTable> {
    let k = system.k();
    let size = level_size(k, n)?;
    if size > cap {
        return Err(Error::OrbitCap { size, cap });
    }
    let size = size as usize;
    let mut images = Vec::with_capacity(size);
    images.push(p.clone());
    for idx in 1..size {
        let parent = (idx - 1) / k;
        let letter = (idx - 1) % k;
        let img = system.apply_generator(letter, &images[parent])?;
        images.push(img);
    }
    Ok(OrbitTable { k, depth: n, images })
}

pub fn orbit_images(system: &System, p: &Point, n: usize) -> Result<OrbitTable> {
    orbit_images_capped(system, p, n, DEFAULT_ORBIT_CAP)
}

/// Visits the image of `p` under every word of `G_n` depth first without
/// materializing a table. The callback returns `false` to stop early.
pub fn for_each_image<F>(system: &System, p: &Point, n: usize, mut visit: F) -> Result<bool>
where
    F: FnMut(&Point) -> bool,
{
    let k = system.k();
    let mut stack: Vec<(Point, usize)> = vec![(p.clone(), 0)];
    while let Some((q, len)) = stack.pop() {
        if !visit(&q) {
            return Ok(false);
        }
        if len + 1 < n {
            for letter in (0..k).rev() {
                stack.push((system.apply_generator(letter, &q)?, len + 1));
            }
        }
    }
    Ok(true)
}

/// Like [`for_each_image`] but walks two points along the same words.
pub fn for_each_image_pair<F>(system: &System, p: &Point, q: &Point, n: usize, mut visit: F) -> Result<bool>
where
    F: FnMut(&Point, &Point) -> Result<bool>,
{
    let k = system.k();
    let mut stack: Vec<(Point, Point, usize)> = vec![(p.clone(), q.clone(), 0)];
    while let Some((a, b, len)) = stack.pop() {
        if !visit(&a, &b)? {
            return Ok(false);
        }
        if len + 1 < n {
            for letter in (0..k).rev() {
                stack.push((
                    system.apply_generator(letter, &a)?,
                    system.apply_generator(letter, &b)?,
                    len + 1,
                ));
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::System;

    fn x(p: &Point) -> f64 {
        p.as_torus().unwrap()[0]
    }

    #[test]
    fn level_size_examples() {
        assert_eq!(level_size(2, 3).unwrap(), 7);
        assert_eq!(level_size(1, 5).unwrap(), 5);
        assert_eq!(level_size(3, 1).unwrap(), 1);
        assert_eq!(level_size(2, 64).unwrap(), u64::MAX);
        assert!(matches!(level_size(2, 65), Err(Error::Overflow { .. })));
        assert!(matches!(level_size(1000, 8), Err(Error::Overflow { .. })));
    }

    #[test]
    fn word_level_enumerates_shortest_first() {
        let words: Vec<Word> = WordLevel::new(2, 3).unwrap().collect();
        assert_eq!(words.len(), 7);
        assert!(words[0].is_empty());
        assert_eq!(words[1], Word(vec![0]));
        assert_eq!(words[6], Word(vec![1, 1]));
        for (i, w) in words.iter().enumerate() {
            assert_eq!(w.table_index(2), i);
        }
    }

    #[test]
    fn orbit_examples() {
        let dbl = System::circle_maps(&[2]).unwrap();
        let p = Point::torus(vec![0.3]);
        let t1 = orbit_images(&dbl, &p, 1).unwrap();
        assert_eq!(t1.len(), 1);
        assert_eq!(x(t1.get(&Word::empty()).unwrap()), 0.3);
        let t = orbit_images(&dbl, &p, 3).unwrap();
        assert!((x(t.get(&Word(vec![0])).unwrap()) - 0.6).abs() < 1e-15);
        assert!((x(t.get(&Word(vec![0, 0])).unwrap()) - 0.2).abs() < 1e-15);

        let two = System::circle_maps(&[2, 3]).unwrap();
        let t = orbit_images(&two, &Point::torus(vec![0.1]), 2).unwrap();
        assert_eq!(t.len(), 3);
        assert!((x(t.get(&Word(vec![0])).unwrap()) - 0.2).abs() < 1e-15);
        assert!((x(t.get(&Word(vec![1])).unwrap()) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn prefix_consistency() {
        let sys = System::circle_maps(&[2, 3, 5]).unwrap();
        let p = Point::torus(vec![0.123]);
        let t = orbit_images(&sys, &p, 4).unwrap();
        for (w, img) in t.iter() {
            if let Some(parent) = w.parent() {
                let last = *w.0.last().unwrap() as usize;
                let expect = sys.apply_generator(last, t.get(&parent).unwrap()).unwrap();
                assert_eq!(&expect, img);
            }
            assert_eq!(&w.apply(&sys, &p).unwrap(), img);
        }
    }

    #[test]
    fn table_size_matches_level_size() {
        for k in 1..4 {
            let sys = System::circle_maps(&[2, 3, 5][..k]).unwrap();
            for n in 1..6 {
                let t = orbit_images(&sys, &Point::torus(vec![0.4]), n).unwrap();
                assert_eq!(t.len() as u64, level_size(k, n).unwrap());
                assert_eq!(t.level(n).unwrap().len(), t.len());
            }
        }
    }

    #[test]
    fn streaming_visits_the_same_images() {
        let sys = System::circle_maps(&[2, 3]).unwrap();
        let p = Point::torus(vec![0.77]);
        let table = orbit_images(&sys, &p, 5).unwrap();
        let mut streamed = Vec::new();
        for_each_image(&sys, &p, 5, |q| {
            streamed.push(x(q));
            true
        })
        .unwrap();
        let mut tabled: Vec<f64> = table.images().iter().map(x).collect();
        streamed.sort_by(f64::total_cmp);
        tabled.sort_by(f64::total_cmp);
        assert_eq!(streamed, tabled);
    }

    #[test]
    fn cap_and_underflow() {
        let sys = System::circle_maps(&[2, 3]).unwrap();
        assert!(matches!(
            orbit_images_capped(&sys, &Point::torus(vec![0.1]), 12, 100),
            Err(Error::OrbitCap { .. })
        ));
        let shift = System::full_shift(2, 2.0, 1).unwrap();
        assert!(matches!(
            orbit_images(&shift, &Point::symbolic(vec![0, 1]), 4),
            Err(Error::DepthUnderflow { .. })
        ));
    }
}
