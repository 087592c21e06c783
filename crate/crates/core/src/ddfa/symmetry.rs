//! Predicate table and argument symmetries.
//!
//! Each geometric predicate is invariant under a fixed permutation group of
//! its arguments. Facts are stored in canonical form (the lexicographically
//! least element of the orbit), and premise matching ranges over the whole
//! orbit, so no symmetry axioms are needed.

use std::sync::OnceLock;

use thiserror::Error;

use crate::fof::GroundAtom;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Predicate {
    Coll,
    Midp,
    Para,
    Perp,
    Cong,
    EqAngle,
    Cyclic,
    Circle,
}

impl Predicate {
    pub const ALL: [Predicate; 8] = [
        Predicate::Coll,
        Predicate::Midp,
        Predicate::Para,
        Predicate::Perp,
        Predicate::Cong,
        Predicate::EqAngle,
        Predicate::Cyclic,
        Predicate::Circle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Predicate::Coll => "coll",
            Predicate::Midp => "midp",
            Predicate::Para => "para",
            Predicate::Perp => "perp",
            Predicate::Cong => "cong",
            Predicate::EqAngle => "eqangle",
            Predicate::Cyclic => "cyclic",
            Predicate::Circle => "circle",
        }
    }

    pub fn from_name(name: &str) -> Option<Predicate> {
        Predicate::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn arity(self) -> usize {
        match self {
            Predicate::Coll | Predicate::Midp => 3,
            Predicate::EqAngle => 8,
            _ => 4,
        }
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }

    /// Every element of the symmetry group, identity first. Applying
    /// permutation `p` to `args` yields `[args[p[0]], args[p[1]], ...]`.
    pub fn group(self) -> &'static [Vec<usize>] {
        static GROUPS: OnceLock<Vec<Vec<Vec<usize>>>> = OnceLock::new();
        &GROUPS.get_or_init(|| Predicate::ALL.iter().map(|p| p.build_group()).collect())[self.index()]
    }

    fn build_group(self) -> Vec<Vec<usize>> {
        match self {
            Predicate::Coll => permutations(&[0, 1, 2]),
            Predicate::Cyclic => permutations(&[0, 1, 2, 3]),
            Predicate::Midp => vec![vec![0, 1, 2], vec![0, 2, 1]],
            Predicate::Circle => {
                permutations(&[1, 2, 3]).into_iter().map(|tail| [vec![0], tail].concat()).collect()
            }
            Predicate::Perp => vec![vec![0, 1, 2, 3], vec![1, 0, 2, 3], vec![0, 1, 3, 2], vec![1, 0, 3, 2]],
            Predicate::Para | Predicate::Cong => vec![
                vec![0, 1, 2, 3],
                vec![1, 0, 2, 3],
                vec![0, 1, 3, 2],
                vec![1, 0, 3, 2],
                vec![2, 3, 0, 1],
                vec![3, 2, 0, 1],
                vec![2, 3, 1, 0],
                vec![3, 2, 1, 0],
            ],
            Predicate::EqAngle => vec![(0..8).collect(), vec![4, 5, 6, 7, 0, 1, 2, 3]],
        }
    }
}

/// All orderings of `items`, lexicographic in index order.
fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

/// Rewrites `args` in place to the orbit minimum.
pub(crate) fn canonical_in_place<T: Ord>(pred: Predicate, args: &mut [T]) {
    fn sort_pair<T: Ord>(args: &mut [T], i: usize) {
        if args[i] > args[i + 1] {
            args.swap(i, i + 1);
        }
    }
    match pred {
        Predicate::Coll | Predicate::Cyclic => args.sort(),
        Predicate::Midp => sort_pair(args, 1),
        Predicate::Circle => args[1..].sort(),
        Predicate::Perp => {
            sort_pair(args, 0);
            sort_pair(args, 2);
        }
        Predicate::Para | Predicate::Cong => {
            sort_pair(args, 0);
            sort_pair(args, 2);
            if args[2..4] < args[0..2] {
                let (lo, hi) = args.split_at_mut(2);
                lo.swap_with_slice(hi);
            }
        }
        Predicate::EqAngle => {
            if args[4..8] < args[0..4] {
                let (lo, hi) = args.split_at_mut(4);
                lo.swap_with_slice(hi);
            }
        }
    }
}

/// Distinct orbit elements of `args`, in group order.
pub(crate) fn orbit<T: Clone + PartialEq>(pred: Predicate, args: &[T]) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = Vec::with_capacity(pred.group().len());
    for perm in pred.group() {
        let image: Vec<T> = perm.iter().map(|&i| args[i].clone()).collect();
        if !out.contains(&image) {
            out.push(image);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CanonError {
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("`{predicate}` takes {expected} arguments, got {got}")]
    Arity { predicate: String, expected: usize, got: usize },
}

/// A ground atom in canonical form. Only [`canonicalize`] builds one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fact(GroundAtom);

impl Fact {
    pub fn predicate(&self) -> &str {
        &self.0.predicate
    }

    pub fn args(&self) -> &[String] {
        &self.0.args
    }

    pub fn atom(&self) -> &GroundAtom {
        &self.0
    }

    pub fn is_canonical(&self) -> bool {
        true
    }
}

impl std::fmt::Display for Fact {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

pub fn check_arity(predicate: &str, got: usize) -> Result<Predicate, CanonError> {
    let pred = Predicate::from_name(predicate).ok_or_else(|| CanonError::UnknownPredicate(predicate.to_string()))?;
    if pred.arity() != got {
        return Err(CanonError::Arity { predicate: predicate.to_string(), expected: pred.arity(), got });
    }
    Ok(pred)
}

pub fn canonicalize<S: AsRef<str>>(predicate: &str, args: &[S]) -> Result<Fact, CanonError> {
    let pred = check_arity(predicate, args.len())?;
    let mut owned: Vec<String> = args.iter().map(|s| s.as_ref().to_string()).collect();
    canonical_in_place(pred, &mut owned);
    Ok(Fact(GroundAtom { predicate: pred.name().to_string(), args: owned }))
}

pub fn canonicalize_atom(atom: &GroundAtom) -> Result<Fact, CanonError> {
    canonicalize(&atom.predicate, &atom.args)
}
