//! The cofinal tower `k_1 = 1`, `k_n = n·m(k_{n-1})·k_{n-1}` of invariant
//! unimodular triangulations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symmetric::{
    equivariant_dilation_refinement, symmetric_unimodular_refinement, SymmetricOptions,
};
use crate::triangulation::{
    is_invariant_unchecked, refines_unchecked, validate, RefinementCertificate, Triangulation,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerIndex {
    pub k: u64,
    pub triangulation: Triangulation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CofinalTower {
    pub r: usize,
    pub entries: Vec<TowerIndex>,
    /// `certificates[i]` shows entry `i + 1` refines entry `i`.
    pub certificates: Vec<RefinementCertificate>,
    /// The dilation factor `m(k_{n-1})` used at each step.
    #[serde(default)]
    pub factors: Vec<u64>,
}

#[derive(Debug, thiserror::Error)]
#[error("tower stopped after {} entries: {error}", partial.entries.len())]
pub struct TowerFailure {
    pub partial: CofinalTower,
    pub error: Error,
}

impl CofinalTower {
    pub fn levels(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.k).collect()
    }

    pub fn depth(&self) -> usize {
        self.entries.len()
    }

    /// Certificate from the last entry down to the first.
    pub fn composed_certificate(&self) -> Option<RefinementCertificate> {
        let mut it = self.certificates.iter().rev();
        let mut acc = it.next()?.clone();
        for c in it {
            acc = acc.compose(c)?;
        }
        Some(acc)
    }

    /// Re-check every tower law; the message names the first failure.
    pub fn verify(&self) -> std::result::Result<(), String> {
        let Some(first) = self.entries.first() else {
            return Err("empty tower".into());
        };
        if first.k != 1 {
            return Err(format!("first level is {}, not 1", first.k));
        }
        let mut factorial = 1u128;
        for (i, e) in self.entries.iter().enumerate() {
            let t = &e.triangulation;
            factorial *= (i + 1) as u128;
            if t.r() != self.r || t.n() != e.k {
                return Err(format!("entry {} has the wrong simplex", i + 1));
            }
            if !(e.k as u128).is_multiple_of(factorial) {
                return Err(format!("{}! does not divide k = {}", i + 1, e.k));
            }
            if !validate(t).is_valid() || !(0..t.cells().len()).all(|c| t.cell_volume(c) == 1) {
                return Err(format!("entry {} is not a unimodular triangulation", i + 1));
            }
            if !is_invariant_unchecked(t) {
                return Err(format!("entry {} is not invariant", i + 1));
            }
        }
        if self.certificates.len() + 1 != self.entries.len() {
            return Err("certificate count does not match the entries".into());
        }
        for (i, c) in self.certificates.iter().enumerate() {
            let (coarse, fine) = (&self.entries[i], &self.entries[i + 1]);
            if fine.k % coarse.k != 0 {
                return Err(format!("k_{} does not divide k_{}", i + 1, i + 2));
            }
            if !c.verify(&fine.triangulation, &coarse.triangulation) {
                return Err(format!("certificate {} fails", i + 1));
            }
        }
        if let Some(c) = self.composed_certificate() {
            let (first, last) = (&self.entries[0], self.entries.last().unwrap());
            if !c.verify(&last.triangulation, &first.triangulation) {
                return Err("composed certificate fails".into());
            }
        }
        Ok(())
    }
}

/// Entries `1..=depth`; step `n` refines level `k_{n-1}` symmetrically to
/// `M = m·k_{n-1}` and then dilates by `n`.
pub fn build_tower(
    r: usize,
    depth: usize,
    opts: &SymmetricOptions,
) -> std::result::Result<CofinalTower, Box<TowerFailure>> {
    let mut tower = CofinalTower {
        r,
        entries: Vec::new(),
        certificates: Vec::new(),
        factors: Vec::new(),
    };
    let fail = |tower: CofinalTower, error: Error| {
        Box::new(TowerFailure {
            partial: tower,
            error,
        })
    };
    if depth == 0 {
        return Err(fail(
            tower,
            Error::InvalidInput("depth must be at least 1".into()),
        ));
    }
    match Triangulation::single_cell(r, 1) {
        Ok(t) => tower.entries.push(TowerIndex {
            k: 1,
            triangulation: t,
        }),
        Err(e) => return Err(fail(tower, e)),
    }
    for step in 2..=depth {
        let prev = tower.entries.last().unwrap().clone();
        let sym = match symmetric_unimodular_refinement(r, prev.k, opts) {
            Ok(s) => s,
            Err(e) => return Err(fail(tower, e)),
        };
        let next = match equivariant_dilation_refinement(&sym.triangulation, step as u64) {
            Ok(t) => t,
            Err(e) => return Err(fail(tower, e)),
        };
        let cert = match refines_unchecked(&next, &prev.triangulation) {
            Ok(c) => c,
            Err(e) => {
                let err = Error::InvalidTriangulation(format!("new entry does not refine: {e}"));
                return Err(fail(tower, err));
            }
        };
        tower.factors.push(sym.m);
        tower.certificates.push(cert);
        tower.entries.push(TowerIndex {
            k: next.n(),
            triangulation: next,
        });
    }
    Ok(tower)
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeResult {
    /// 1-based position in the tower.
    pub index: usize,
    pub level: u64,
    pub certificate: RefinementCertificate,
}

/// The least entry refining `probe`.
pub fn cofinality_probe(tower: &CofinalTower, probe: &Triangulation) -> Result<ProbeResult> {
    if probe.r() != tower.r {
        return Err(Error::DimensionMismatch {
            expected: tower.r,
            actual: probe.r(),
        });
    }
    let report = validate(probe);
    if !report.is_valid() {
        return Err(Error::InvalidTriangulation(format!(
            "{} violations",
            report.violations.len()
        )));
    }
    if !(0..probe.cells().len()).all(|c| probe.cell_volume(c) == 1) {
        return Err(Error::InvalidTriangulation(
            "probe is not unimodular".into(),
        ));
    }
    for (i, e) in tower.entries.iter().enumerate() {
        if e.k % probe.n() != 0 {
            continue;
        }
        if let Ok(certificate) = refines_unchecked(&e.triangulation, probe) {
            return Ok(ProbeResult {
                index: i + 1,
                level: e.k,
                certificate,
            });
        }
    }
    Err(Error::TowerTooShallow {
        depth: tower.entries.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_tower() {
        let t = build_tower(1, 4, &SymmetricOptions::default()).unwrap();
        assert_eq!(t.levels(), vec![1, 2, 6, 24]);
        assert_eq!(t.factors, vec![1, 1, 1]);
        t.verify().unwrap();
    }

    #[test]
    fn triangle_tower() {
        let t = build_tower(2, 2, &SymmetricOptions::default()).unwrap();
        assert_eq!(t.levels(), vec![1, 2]);
        t.verify().unwrap();
    }

    #[test]
    fn probes() {
        let t = build_tower(1, 3, &SymmetricOptions::default()).unwrap();
        let trivial = Triangulation::single_cell(1, 1).unwrap();
        assert_eq!(cofinality_probe(&t, &trivial).unwrap().index, 1);
        let three = Triangulation::new(1, 3, vec![vec![0, 1], vec![1, 2], vec![2, 3]]).unwrap();
        assert_eq!(cofinality_probe(&t, &three).unwrap().index, 3);
        let wrong = Triangulation::single_cell(2, 1).unwrap();
        assert!(matches!(
            cofinality_probe(&t, &wrong),
            Err(Error::DimensionMismatch { .. })
        ));
        let four = Triangulation::new(1, 4, (0..4).map(|i| vec![i, i + 1]).collect()).unwrap();
        assert!(matches!(
            cofinality_probe(&t, &four),
            Err(Error::TowerTooShallow { depth: 3 })
        ));
    }

    #[test]
    fn failure_keeps_partial_tower() {
        let err = build_tower(3, 2, &SymmetricOptions::default()).unwrap_err();
        assert_eq!(err.partial.levels(), vec![1]);
        assert!(matches!(err.error, Error::DilationBoundExceeded { .. }));
    }

    #[test]
    fn tower_json_round_trip() {
        let t = build_tower(1, 3, &SymmetricOptions::default()).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        let back: CofinalTower = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }
}
