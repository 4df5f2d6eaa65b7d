//! Homomorphisms from a free group onto small quotients. The kernel of such a
//! map is the normal subgroup under study; `image` doubles as its membership
//! oracle.

use serde::{Deserialize, Serialize};

use super::word::{Letter, ReducedWord};
use crate::error::{Error, Result};

/// An element of the target group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetElement {
    Finite(usize),
    Abelian(Vec<i64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Target {
    /// A finite group given by its Cayley table `table[x][y] = x * y`.
    Finite { table: Vec<Vec<usize>>, identity: usize },
    FreeAbelian { rank: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HomSpec", into = "HomSpec")]
pub struct QuotientHom {
    rank: usize,
    target: Target,
    images: Vec<TargetElement>,
    inverses: Vec<usize>,
}

/// Serialized form of a [`QuotientHom`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomSpec {
    pub rank: usize,
    pub target: Target,
    pub images: Vec<TargetElement>,
}

impl TryFrom<HomSpec> for QuotientHom {
    type Error = Error;

    fn try_from(spec: HomSpec) -> Result<Self> {
        QuotientHom::new(spec.rank, spec.target, spec.images)
    }
}

impl From<QuotientHom> for HomSpec {
    fn from(hom: QuotientHom) -> Self {
        HomSpec { rank: hom.rank, target: hom.target, images: hom.images }
    }
}

impl QuotientHom {
    pub fn new(rank: usize, target: Target, images: Vec<TargetElement>) -> Result<Self> {
        if images.len() != rank {
            return Err(Error::InvalidHom(format!("{} images for rank {rank}", images.len())));
        }
        let inverses = match &target {
            Target::Finite { table, identity } => {
                let inverses = check_group_table(table, *identity)?;
                for img in &images {
                    match img {
                        TargetElement::Finite(x) if *x < table.len() => {}
                        other => return Err(Error::InvalidHom(format!("image {other:?} is not in a group of order {}", table.len()))),
                    }
                }
                inverses
            }
            Target::FreeAbelian { rank: r } => {
                for img in &images {
                    match img {
                        TargetElement::Abelian(v) if v.len() == *r => {}
                        other => return Err(Error::InvalidHom(format!("image {other:?} is not in Z^{r}"))),
                    }
                }
                Vec::new()
            }
        };
        Ok(QuotientHom { rank, target, images, inverses })
    }

    /// The map onto the trivial group; its kernel is everything.
    pub fn trivial(rank: usize) -> Self {
        QuotientHom::cyclic(rank, 1, &vec![0; rank]).expect("Z/1 is well formed")
    }

    /// Abelianization `F_k -> Z^k`; its kernel is the commutator subgroup.
    pub fn abelianization(rank: usize) -> Self {
        let images = (0..rank)
            .map(|i| {
                let mut v = vec![0; rank];
                v[i] = 1;
                TargetElement::Abelian(v)
            })
            .collect();
        QuotientHom::new(rank, Target::FreeAbelian { rank }, images).expect("unit vectors are well formed")
    }

    /// Generator `i` maps to `images[i]` in `Z/n`.
    pub fn cyclic(rank: usize, n: usize, images: &[usize]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidHom("Z/0 is not finite".into()));
        }
        let table = (0..n).map(|x| (0..n).map(|y| (x + y) % n).collect()).collect();
        let images = images.iter().map(|&x| TargetElement::Finite(x % n)).collect();
        QuotientHom::new(rank, Target::Finite { table, identity: 0 }, images)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn target(&self) -> &Target {
        &self.target
    }

    pub fn images(&self) -> &[TargetElement] {
        &self.images
    }

    pub fn identity(&self) -> TargetElement {
        match &self.target {
            Target::Finite { identity, .. } => TargetElement::Finite(*identity),
            Target::FreeAbelian { rank } => TargetElement::Abelian(vec![0; *rank]),
        }
    }

    /// Image of a single letter.
    pub fn letter_image(&self, l: Letter) -> TargetElement {
        let img = &self.images[l.generator()];
        if !l.is_inverse() {
            return img.clone();
        }
        match img {
            TargetElement::Finite(x) => TargetElement::Finite(self.inverses[*x]),
            TargetElement::Abelian(v) => TargetElement::Abelian(v.iter().map(|c| -c).collect()),
        }
    }

    pub fn multiply(&self, x: &TargetElement, y: &TargetElement) -> TargetElement {
        match (&self.target, x, y) {
            (Target::Finite { table, .. }, TargetElement::Finite(x), TargetElement::Finite(y)) => TargetElement::Finite(table[*x][*y]),
            (Target::FreeAbelian { .. }, TargetElement::Abelian(x), TargetElement::Abelian(y)) => {
                TargetElement::Abelian(x.iter().zip(y).map(|(a, b)| a + b).collect())
            }
            _ => panic!("target element kinds do not match the homomorphism"),
        }
    }

    /// Image of `w` and whether it lies in the kernel.
    pub fn image(&self, w: &ReducedWord) -> (TargetElement, bool) {
        let img = self.image_of_letters(w.letters());
        let member = img == self.identity();
        (img, member)
    }

    pub fn image_of_letters(&self, letters: &[Letter]) -> TargetElement {
        match &self.target {
            Target::Finite { table, identity } => {
                let mut x = *identity;
                for &l in letters {
                    let TargetElement::Finite(y) = self.letter_image(l) else { unreachable!() };
                    x = table[x][y];
                }
                TargetElement::Finite(x)
            }
            Target::FreeAbelian { rank } => {
                let mut v = vec![0i64; *rank];
                for &l in letters {
                    let TargetElement::Abelian(img) = &self.images[l.generator()] else { unreachable!() };
                    let sign = i64::from(l.sign());
                    for (a, b) in v.iter_mut().zip(img) {
                        *a += sign * b;
                    }
                }
                TargetElement::Abelian(v)
            }
        }
    }

    pub fn is_kernel_member(&self, w: &ReducedWord) -> bool {
        self.kernel_contains(w.letters())
    }

    pub fn kernel_contains(&self, letters: &[Letter]) -> bool {
        self.image_of_letters(letters) == self.identity()
    }

    /// True when the target is the trivial group.
    pub fn is_trivial(&self) -> bool {
        match &self.target {
            Target::Finite { table, .. } => table.len() == 1,
            Target::FreeAbelian { rank } => *rank == 0,
        }
    }

    /// Short human-readable description, e.g. `cyclic:n=2,images=1;0`.
    pub fn describe(&self) -> String {
        match &self.target {
            Target::FreeAbelian { .. } if *self == QuotientHom::abelianization(self.rank) => "abelian".to_string(),
            Target::Finite { table, identity: 0 } if is_cyclic_table(table) => {
                let imgs: Vec<String> = self
                    .images
                    .iter()
                    .map(|e| match e {
                        TargetElement::Finite(x) => x.to_string(),
                        TargetElement::Abelian(_) => unreachable!(),
                    })
                    .collect();
                format!("cyclic:n={},images={}", table.len(), imgs.join(";"))
            }
            _ => "custom".to_string(),
        }
    }
}

fn is_cyclic_table(table: &[Vec<usize>]) -> bool {
    let n = table.len();
    (0..n).all(|x| (0..n).all(|y| table[x][y] == (x + y) % n))
}

/// Validates a Cayley table and returns the inverse of each element.
#[allow(clippy::needless_range_loop)]
fn check_group_table(table: &[Vec<usize>], identity: usize) -> Result<Vec<usize>> {
    let n = table.len();
    if n == 0 || identity >= n || table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
        return Err(Error::InvalidHom("Cayley table must be square with entries in range".into()));
    }
    for x in 0..n {
        if table[identity][x] != x || table[x][identity] != x {
            return Err(Error::InvalidHom(format!("{identity} is not a two-sided identity")));
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if table[table[x][y]][z] != table[x][table[y][z]] {
                    return Err(Error::InvalidHom(format!("table is not associative at ({x},{y},{z})")));
                }
            }
        }
    }
    (0..n)
        .map(|x| {
            (0..n)
                .find(|&y| table[x][y] == identity)
                .ok_or_else(|| Error::InvalidHom(format!("{x} has no inverse")))
        })
        .collect()
}
