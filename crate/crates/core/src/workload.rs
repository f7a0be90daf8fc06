//! Ready-made inputs for the verifiers: standard apartments and their
//! single-member perturbations.

use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::apartments::{apartment, standard_parabolic, Apartment, Theorem, VerifyRequest};
use crate::error::{Error, Result};
use crate::grassmann::neighbors;
use crate::polar::{Frame, PolarSpace, SingularSubspace};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generated {
    /// The apartment of the standard frame.
    Apartment,
    /// An apartment of `[N⟩_k` with `N = ⟨e_1..e_{k−m}⟩`.
    Parabolic,
    /// The set generated by the first `l` pairs of the standard frame.
    Lframe,
}

impl FromStr for Generated {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "apartment" => Ok(Generated::Apartment),
            "parabolic" => Ok(Generated::Parabolic),
            "lframe" | "l-frame" => Ok(Generated::Lframe),
            _ => Err(Error::param(format!("unknown generated set '{s}'"))),
        }
    }
}

impl fmt::Display for Generated {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Generated::Apartment => "apartment",
            Generated::Parabolic => "parabolic",
            Generated::Lframe => "lframe",
        })
    }
}

/// Builds a set of the requested shape. Missing parameters default to the
/// full apartment of the relevant space; for the hypercube theorem the level
/// is `n−1` and `m` is the cube dimension.
pub fn generate(
    space: &PolarSpace,
    which: Generated,
    theorem: Option<Theorem>,
    k: Option<usize>,
    m: Option<usize>,
    l: Option<usize>,
) -> Result<Apartment> {
    let n = space.rank();
    if theorem == Some(Theorem::Thm41) {
        let cube = m.unwrap_or(n);
        if cube == 0 || cube > n {
            return Err(Error::param(format!("cube dimension {cube} outside 1..={n}")));
        }
        return match which {
            Generated::Apartment if cube == n => apartment(space, &space.standard_frame(), n - 1),
            Generated::Apartment => Err(Error::param("a full apartment of maximal subspaces has cube dimension n")),
            Generated::Parabolic => standard_parabolic(space, n - 1, cube - 1, cube),
            Generated::Lframe => Err(Error::param("l-frames of maximal subspaces need a parabolic base")),
        };
    }
    let k = k.ok_or_else(|| Error::param("the level -k is required"))?;
    match which {
        Generated::Apartment => apartment(space, &space.standard_frame(), k),
        Generated::Parabolic => {
            let m = m.ok_or_else(|| Error::param("-m is required for a parabolic set"))?;
            if m > k {
                return Err(Error::param(format!("m = {m} exceeds k = {k}")));
            }
            let l = l.unwrap_or(n - (k - m));
            standard_parabolic(space, k, m, l)
        }
        Generated::Lframe => {
            let l = l.unwrap_or(n);
            if l == 0 || l > n {
                return Err(Error::param(format!("l = {l} outside 1..={n}")));
            }
            let std = space.standard_frame();
            apartment(space, &Frame::from_pairs(std.points[..2 * l].to_vec()), k)
        }
    }
}

/// The verifier request matching a generated set.
pub fn request_for(theorem: Theorem, apt: &Apartment) -> VerifyRequest {
    VerifyRequest {
        theorem,
        l: apt.l,
        m: if theorem == Theorem::Thm41 { apt.l } else { apt.m },
        members: apt.members.clone(),
        map: None,
    }
}

/// Replaces one random member by a random adjacent non-member. Returns the
/// new member list and the index that changed.
pub fn perturb<R: Rng>(space: &PolarSpace, members: &[SingularSubspace], rng: &mut R) -> Result<(Vec<SingularSubspace>, usize)> {
    let mut sorted = members.to_vec();
    sorted.sort();
    let order: Vec<usize> = (0..members.len()).collect();
    for _ in 0..members.len().max(1) * 4 {
        let &i = order.choose(rng).ok_or_else(|| Error::param("nothing to perturb"))?;
        let outside: Vec<SingularSubspace> = neighbors(space, &members[i])
            .into_iter()
            .filter(|x| sorted.binary_search(x).is_err())
            .collect();
        if let Some(x) = outside.choose(rng) {
            let mut out = members.to_vec();
            out[i] = x.clone();
            return Ok((out, i));
        }
    }
    Err(Error::Inconsistent("no member has an adjacent non-member".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polar::FormKind;
    use rand::SeedableRng;

    #[test]
    fn generated_sizes() {
        let s = PolarSpace::build(FormKind::Symplectic, 3, 2).unwrap();
        assert_eq!(generate(&s, Generated::Apartment, None, Some(1), None, None).unwrap().len(), 12);
        assert_eq!(generate(&s, Generated::Apartment, Some(Theorem::Thm41), None, None, None).unwrap().len(), 8);
        let sq = generate(&s, Generated::Parabolic, Some(Theorem::Thm41), None, Some(2), None).unwrap();
        assert_eq!(sq.len(), 4);
        assert_eq!(sq.base.proj_dim(), 0);
        assert_eq!(generate(&s, Generated::Lframe, None, Some(1), None, Some(2)).unwrap().len(), 4);
    }

    #[test]
    fn perturbation_changes_one_member() {
        let s = PolarSpace::build(FormKind::Symplectic, 3, 2).unwrap();
        let apt = generate(&s, Generated::Apartment, None, Some(1), None, None).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let (out, i) = perturb(&s, &apt.members, &mut rng).unwrap();
        let changed: Vec<usize> = (0..out.len()).filter(|&j| out[j] != apt.members[j]).collect();
        assert_eq!(changed, vec![i]);
        assert!(!apt.members.contains(&out[i]));
    }
}
