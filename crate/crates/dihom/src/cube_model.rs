//! The pasting scheme `Λ^n` of the n-cube and the free ω-category `I^n` it
//! generates. A cell of `I^n` is stored as its full downward-closed set of
//! faces, so equality is set equality and composition is union.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest `n` accepted by [`enumerate_in`].
pub const MAX_ENUMERATION_DIM: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CubeError {
    #[error("face word {0} has dimension 0")]
    ZeroDimensional(FaceWord),
    #[error("face words of different lengths")]
    MixedLength,
    #[error("cells are not {0}-composable")]
    NotComposable(usize),
    #[error("enumeration of I^{n} exceeds the cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("invalid face letter {0:?}")]
    BadLetter(char),
}

/// One coordinate of a face. The derived order is `- < 0 < +`, which is the
/// order used by connections (max/min of letters) and by canonical sorting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Letter {
    Minus,
    Zero,
    Plus,
}

/// Orientation of a face map, source (`Minus`) or target (`Plus`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Minus, Sign::Plus];

    pub fn letter(self) -> Letter {
        match self {
            Sign::Minus => Letter::Minus,
            Sign::Plus => Letter::Plus,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
        }
    }

    /// `(-)^k`.
    pub fn power(k: usize) -> Sign {
        if k.is_multiple_of(2) {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Minus => '-',
            Sign::Plus => '+',
        }
    }
}

impl Letter {
    pub const ALL: [Letter; 3] = [Letter::Minus, Letter::Zero, Letter::Plus];

    pub fn symbol(self) -> char {
        match self {
            Letter::Minus => '-',
            Letter::Zero => '0',
            Letter::Plus => '+',
        }
    }

    /// Position of the letter in base-3 indexing (`- = 0`, `0 = 1`, `+ = 2`).
    pub fn digit(self) -> usize {
        self as usize
    }
}

/// A face of the n-cube: a word over `{-, 0, +}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FaceWord(pub Vec<Letter>);

impl FaceWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.0.iter().filter(|&&l| l == Letter::Zero).count()
    }

    /// The word `0^n`.
    pub fn top(n: usize) -> FaceWord {
        FaceWord(vec![Letter::Zero; n])
    }

    /// Base-3 rank of the word, most significant letter first.
    pub fn index(&self) -> usize {
        self.0.iter().fold(0, |acc, l| acc * 3 + l.digit())
    }

    pub fn from_index(n: usize, mut idx: usize) -> FaceWord {
        let mut letters = vec![Letter::Minus; n];
        for slot in letters.iter_mut().rev() {
            *slot = Letter::ALL[idx % 3];
            idx /= 3;
        }
        FaceWord(letters)
    }

    /// Insert `letter` so that it becomes the `i`-th letter (1-based).
    pub fn insert(&self, i: usize, letter: Letter) -> FaceWord {
        let mut v = self.0.clone();
        v.insert(i - 1, letter);
        FaceWord(v)
    }

    fn replace(&self, pos: usize, letter: Letter) -> FaceWord {
        let mut v = self.0.clone();
        v[pos] = letter;
        FaceWord(v)
    }

    fn zeros(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &l)| l == Letter::Zero).map(|(i, _)| i)
    }
}

impl fmt::Display for FaceWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for l in &self.0 {
            write!(f, "{}", l.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for FaceWord {
    type Err = CubeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "ε" {
            return Ok(FaceWord(Vec::new()));
        }
        s.chars()
            .map(|c| match c {
                '-' => Ok(Letter::Minus),
                '0' => Ok(Letter::Zero),
                '+' => Ok(Letter::Plus),
                other => Err(CubeError::BadLetter(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(FaceWord)
    }
}

/// Parse a literal face word; panics on bad input. Meant for fixtures.
pub fn fw(s: &str) -> FaceWord {
    s.parse().expect("valid face word literal")
}

/// All `3^n` faces of the n-cube, in lexicographic order.
pub fn enumerate_faces(n: usize) -> Vec<FaceWord> {
    (0..3usize.pow(n as u32)).map(|i| FaceWord::from_index(n, i)).collect()
}

/// The codimension-one faces `b_y(x)` (side `-`) or `e_y(x)` (side `+`): the
/// `l`-th zero becomes `(-)^l` on the source side and `(-)^{l+1}` on the
/// target side.
pub fn boundary_faces(x: &FaceWord, side: Sign) -> Result<Vec<FaceWord>, CubeError> {
    if x.dim() == 0 {
        return Err(CubeError::ZeroDimensional(x.clone()));
    }
    Ok(x.zeros()
        .enumerate()
        .map(|(k, pos)| {
            let l = k + 1;
            let sign = match side {
                Sign::Minus => Sign::power(l),
                Sign::Plus => Sign::power(l + 1),
            };
            x.replace(pos, sign.letter())
        })
        .collect())
}

/// A cell of `I^n`, canonically its downward-closed face set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CubeCell {
    pub n: usize,
    pub faces: BTreeSet<FaceWord>,
}

impl CubeCell {
    /// `R({x})`.
    pub fn atom(x: &FaceWord) -> CubeCell {
        closure_of_len(x.len(), std::iter::once(x.clone()))
    }

    /// Maximal face dimension; `None` for the empty cell.
    pub fn dim(&self) -> Option<usize> {
        self.faces.iter().map(FaceWord::dim).max()
    }

    /// Faces not contained in the closure of another face.
    pub fn maximal_faces(&self) -> Vec<FaceWord> {
        let mut covered = BTreeSet::new();
        for x in &self.faces {
            if x.dim() > 0 {
                for side in Sign::BOTH {
                    for y in boundary_faces(x, side).unwrap() {
                        covered.insert(y);
                    }
                }
            }
        }
        self.faces.iter().filter(|x| !covered.contains(*x)).cloned().collect()
    }

    pub fn source(&self, p: usize) -> CubeCell {
        cell_source_target(self, p, Sign::Minus)
    }

    pub fn target(&self, p: usize) -> CubeCell {
        cell_source_target(self, p, Sign::Plus)
    }
}

impl fmt::Display for CubeCell {
    /// Prints the maximal faces, e.g. `R(-0,0+)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.maximal_faces().iter().map(|w| w.to_string()).collect();
        write!(f, "R({})", gens.join(","))
    }
}

fn closure_of_len(n: usize, words: impl IntoIterator<Item = FaceWord>) -> CubeCell {
    let mut faces = BTreeSet::new();
    let mut stack: Vec<FaceWord> = words.into_iter().collect();
    while let Some(x) = stack.pop() {
        if !faces.insert(x.clone()) || x.dim() == 0 {
            continue;
        }
        for side in Sign::BOTH {
            stack.extend(boundary_faces(&x, side).unwrap());
        }
    }
    CubeCell { n, faces }
}

/// `R(X)`: the smallest set containing `X` closed under the begin and end
/// relations. Every face of a face is an iterated begin or end face, so this
/// is the downward closure.
pub fn closure(words: &[FaceWord]) -> Result<CubeCell, CubeError> {
    let n = words.first().map_or(0, FaceWord::len);
    if words.iter().any(|w| w.len() != n) {
        return Err(CubeError::MixedLength);
    }
    Ok(closure_of_len(n, words.iter().cloned()))
}

/// `s_p(c)` for side `-`, `t_p(c)` for side `+`.
///
/// The p-faces kept are those that are not an end face (resp. begin face) of
/// some (p+1)-face of `c`; lower-dimensional maximal faces pass through
/// unchanged. For `p ≥ dim c` the cell is returned.
pub fn cell_source_target(c: &CubeCell, p: usize, side: Sign) -> CubeCell {
    match c.dim() {
        None => return c.clone(),
        Some(d) if p >= d => return c.clone(),
        _ => {}
    }
    let excluded: BTreeSet<FaceWord> = c
        .faces
        .iter()
        .filter(|x| x.dim() == p + 1)
        .flat_map(|x| boundary_faces(x, side.flip()).unwrap())
        .collect();
    let mut gens: Vec<FaceWord> = c
        .faces
        .iter()
        .filter(|x| x.dim() == p && !excluded.contains(*x))
        .cloned()
        .collect();
    gens.extend(c.maximal_faces().into_iter().filter(|x| x.dim() < p));
    closure_of_len(c.n, gens)
}

/// `a *_p b`, defined when `t_p(a) = s_p(b)`.
pub fn compose_cells(a: &CubeCell, b: &CubeCell, p: usize) -> Result<CubeCell, CubeError> {
    if a.n != b.n || cell_source_target(a, p, Sign::Plus) != cell_source_target(b, p, Sign::Minus) {
        return Err(CubeError::NotComposable(p));
    }
    Ok(CubeCell { n: a.n, faces: a.faces.union(&b.faces).cloned().collect() })
}

/// Every cell of `I^n`: the closure of the atoms `R({x})` under all defined
/// compositions `*_p`, in canonical order.
pub fn enumerate_in(n: usize) -> Result<Vec<CubeCell>, CubeError> {
    if n > MAX_ENUMERATION_DIM {
        return Err(CubeError::CapExceeded { n, cap: MAX_ENUMERATION_DIM });
    }
    let mut cells: BTreeSet<CubeCell> = BTreeSet::new();
    // (p, s_p cell) -> cells with that p-source, and likewise for targets.
    let mut by_source: BTreeMap<(usize, CubeCell), Vec<CubeCell>> = BTreeMap::new();
    let mut by_target: BTreeMap<(usize, CubeCell), Vec<CubeCell>> = BTreeMap::new();
    let mut queue: VecDeque<CubeCell> = enumerate_faces(n).iter().map(CubeCell::atom).collect();

    while let Some(c) = queue.pop_front() {
        if cells.contains(&c) {
            continue;
        }
        let d = c.dim().unwrap_or(0);
        for p in 0..d {
            let s = c.source(p);
            let t = c.target(p);
            for other in by_source.get(&(p, t.clone())).into_iter().flatten() {
                if other.dim().unwrap_or(0) > p {
                    queue.push_back(union(&c, other));
                }
            }
            for other in by_target.get(&(p, s.clone())).into_iter().flatten() {
                if other.dim().unwrap_or(0) > p {
                    queue.push_back(union(other, &c));
                }
            }
            by_source.entry((p, s)).or_default().push(c.clone());
            by_target.entry((p, t)).or_default().push(c.clone());
        }
        cells.insert(c);
    }
    Ok(cells.into_iter().collect())
}

fn union(a: &CubeCell, b: &CubeCell) -> CubeCell {
    CubeCell { n: a.n, faces: a.faces.union(&b.faces).cloned().collect() }
}

/// Image of `c` under the coface functor `δ_i^side : I^n → I^{n+1}`.
pub fn delta_image(i: usize, side: Sign, c: &CubeCell) -> Result<CubeCell, CubeError> {
    if i == 0 || i > c.n + 1 {
        return Err(CubeError::IndexOutOfRange { index: i, max: c.n + 1 });
    }
    Ok(closure_of_len(c.n + 1, c.faces.iter().map(|w| w.insert(i, side.letter()))))
}
