//! Quivers: vertices 0..n, arrows grouped into parallel classes, and the
//! integer weights attached to every arrow and its reversal.
//!
//! Within a parallel class of a arrows joining the same pair of vertices
//! (orientation ignored for class membership), the p-th arrow in input order
//! carries weight a + 2 - 2p and its reversal carries -a + 2p; the two always
//! sum to 2, and across the class the weights walk a, a-2, ..., 2-a. A single
//! arrow gets (1, 1).

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Dimension vector over the vertex set.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DimVec(pub Vec<u32>);

impl DimVec {
    pub fn zero(n: usize) -> DimVec {
        DimVec(alloc::vec![0; n])
    }

    pub fn unit(n: usize, k: usize) -> DimVec {
        let mut v = DimVec::zero(n);
        v.0[k] = 1;
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn norm1(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, o: &DimVec) -> DimVec {
        debug_assert_eq!(self.len(), o.len());
        DimVec(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn leq(&self, o: &DimVec) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a <= b)
    }
}

impl fmt::Display for DimVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Arrow {
    pub out: usize,
    pub inc: usize,
    /// Weight of the arrow itself (numerator shift is weight/2 * h).
    pub weight: i64,
    /// Weight of the reversed arrow; always 2 - weight.
    pub weight_rev: i64,
}

#[derive(Clone, Debug)]
pub struct Quiver {
    n: usize,
    arrows: Vec<Arrow>,
    allow_loops: bool,
    warnings: Vec<String>,
}

impl Quiver {
    /// Builds from an explicit arrow list. Class weights follow input order
    /// within each parallel class.
    pub fn from_arrows(n: usize, pairs: &[(usize, usize)], allow_loops: bool) -> Result<Quiver> {
        if n == 0 {
            return Err(Error::Quiver(String::from("need at least one vertex")));
        }
        for &(o, c) in pairs {
            if o >= n || c >= n {
                return Err(Error::Quiver(alloc::format!(
                    "arrow {o}->{c} out of range for {n} vertices"
                )));
            }
            if o == c && !allow_loops {
                return Err(Error::Quiver(alloc::format!(
                    "loop at vertex {o} but loops are not allowed here"
                )));
            }
        }
        // parallel classes keyed by unordered endpoints, in input order
        let mut arrows = Vec::with_capacity(pairs.len());
        let mut warnings = Vec::new();
        let class_of = |o: usize, c: usize| (o.min(c), o.max(c));
        let mut seen_classes: Vec<(usize, usize)> = Vec::new();
        for &(o, c) in pairs {
            let key = class_of(o, c);
            if !seen_classes.contains(&key) {
                seen_classes.push(key);
            }
        }
        for key in seen_classes {
            let members: Vec<(usize, usize)> = pairs
                .iter()
                .copied()
                .filter(|&(o, c)| class_of(o, c) == key)
                .collect();
            let a = members.len() as i64;
            if key.0 == key.1 {
                warnings.push(alloc::format!(
                    "loop class at vertex {}: {} arrow(s)",
                    key.0, a
                ));
            } else if a >= 2 {
                warnings.push(alloc::format!(
                    "vertices {} and {} joined by {} parallel arrows (Cartan entry {})",
                    key.0, key.1, a, -a
                ));
            }
            for (idx, (o, c)) in members.into_iter().enumerate() {
                let p = idx as i64 + 1;
                arrows.push(Arrow {
                    out: o,
                    inc: c,
                    weight: a + 2 - 2 * p,
                    weight_rev: -a + 2 * p,
                });
            }
        }
        Ok(Quiver { n, arrows, allow_loops, warnings })
    }

    /// Builds from a symmetric generalized Cartan matrix with diagonal 2.
    /// Off-diagonal -a becomes a parallel arrows oriented low -> high vertex.
    pub fn from_cartan(c: &[Vec<i64>]) -> Result<Quiver> {
        let n = c.len();
        if n == 0 || c.iter().any(|row| row.len() != n) {
            return Err(Error::Quiver(String::from("Cartan matrix must be square and nonempty")));
        }
        for i in 0..n {
            if c[i][i] != 2 {
                return Err(Error::Quiver(alloc::format!(
                    "Cartan diagonal entry at {i} is {}, expected 2 (loops need an arrow list)",
                    c[i][i]
                )));
            }
            for j in 0..n {
                if i != j {
                    if c[i][j] > 0 {
                        return Err(Error::Quiver(alloc::format!(
                            "off-diagonal Cartan entry ({i},{j}) = {} must be <= 0",
                            c[i][j]
                        )));
                    }
                    if c[i][j] != c[j][i] {
                        return Err(Error::Quiver(alloc::format!(
                            "Cartan matrix not symmetric at ({i},{j})"
                        )));
                    }
                }
            }
        }
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for _ in 0..(-c[i][j]) {
                    pairs.push((i, j));
                }
            }
        }
        Quiver::from_arrows(n, &pairs, false)
    }

    /// Oriented cycle on n vertices (n >= 2): the standard affine type-A
    /// quiver; cycle(2) degenerates to the doubled pair.
    pub fn cycle(n: usize) -> Quiver {
        debug_assert!(n >= 2);
        let pairs: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Quiver::from_arrows(n, &pairs, false).expect("cycle is valid")
    }

    /// Path on n vertices: finite type-A quiver.
    pub fn path(n: usize) -> Quiver {
        let pairs: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        Quiver::from_arrows(n, &pairs, false).expect("path is valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn allow_loops(&self) -> bool {
        self.allow_loops
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Number of arrows oriented exactly i -> j.
    pub fn arrows_from_to(&self, i: usize, j: usize) -> u32 {
        self.arrows
            .iter()
            .filter(|a| a.out == i && a.inc == j)
            .count() as u32
    }

    /// Reconstructed symmetric Cartan matrix: off-diagonal counts arrows in
    /// both directions, a loop drops the diagonal by 2.
    pub fn cartan(&self) -> Vec<Vec<i64>> {
        let mut c = alloc::vec![alloc::vec![0i64; self.n]; self.n];
        for i in 0..self.n {
            c[i][i] = 2;
        }
        for a in &self.arrows {
            if a.out == a.inc {
                c[a.out][a.out] -= 2;
            } else {
                c[a.out][a.inc] -= 1;
                c[a.inc][a.out] -= 1;
            }
        }
        c
    }

    pub fn cartan_entry(&self, i: usize, j: usize) -> i64 {
        if i == j {
            2 - 2 * self.arrows_from_to(i, i) as i64
        } else {
            -((self.arrows_from_to(i, j) + self.arrows_from_to(j, i)) as i64)
        }
    }

    pub fn unit(&self, k: usize) -> DimVec {
        DimVec::unit(self.n, k)
    }
}
