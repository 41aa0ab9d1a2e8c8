//! The transport datum: nodes, bulk and shadow kernels, probes, support and
//! state data, and the per-channel interaction invariants built from them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cxcore::{
    is_quasi_iso, quasi_iso_between, BoundedComplex, ChainMap, ComplexRepr, Degree,
};
use crate::homcx::{hom_complex, poincare_of, postcompose, precompose, LaurentPoly};
use crate::ratlin::{RatMatrix, Rational};
use crate::transport::{KernelRepr, SectorId, SectorMap, TransportError, TransportKernel};

pub const DEFAULT_BULK: &str = "bulk";
pub const DEFAULT_SHADOW: &str = "shadow";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiagnosticKind {
    Parse,
    Validation,
    Wiring,
    Compatibility,
}

/// One problem found in a datum, naming the offending field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub field: String,
    pub message: String,
}

impl Diagnostic {
    fn new(kind: DiagnosticKind, field: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            kind,
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            DiagnosticKind::Parse => "parse",
            DiagnosticKind::Validation => "validation",
            DiagnosticKind::Wiring => "wiring",
            DiagnosticKind::Compatibility => "compatibility",
        };
        write!(f, "{kind} error in {}: {}", self.field, self.message)
    }
}

#[derive(Debug, Error)]
pub enum DatumError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{}", join_diagnostics(.0))]
    Invalid(Vec<Diagnostic>),
}

fn join_diagnostics(ds: &[Diagnostic]) -> String {
    ds.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl DatumError {
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        match self {
            DatumError::Io { path, source } => vec![Diagnostic::new(
                DiagnosticKind::Parse,
                path.clone(),
                source.to_string(),
            )],
            DatumError::Invalid(ds) => ds.clone(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChannelError {
    #[error("channel index {index} out of range for {nodes} nodes")]
    IndexOutOfRange { index: usize, nodes: usize },
    #[error(transparent)]
    Transport(#[from] TransportError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatePackage {
    pub vertices: Vec<String>,
    pub basis_labels: Vec<String>,
    pub c_sigma: Vec<Rational>,
}

/// The datum exactly as it appears on disk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatumFile {
    pub nodes: Vec<String>,
    #[serde(default = "default_bulk", skip_serializing_if = "is_default_bulk")]
    pub bulk_sector: SectorId,
    #[serde(default = "default_shadow", skip_serializing_if = "is_default_shadow")]
    pub shadow_sector: SectorId,
    pub phi: Vec<KernelRepr>,
    pub psi: Vec<KernelRepr>,
    pub probes: Vec<ComplexRepr>,
    pub shadow_kernels: Vec<KernelRepr>,
    pub shadow_objects: Vec<ComplexRepr>,
    pub support: Vec<Vec<u8>>,
    pub state: StatePackage,
}

fn default_bulk() -> SectorId {
    DEFAULT_BULK.to_string()
}

fn default_shadow() -> SectorId {
    DEFAULT_SHADOW.to_string()
}

fn is_default_bulk(s: &SectorId) -> bool {
    s == DEFAULT_BULK
}

fn is_default_shadow(s: &SectorId) -> bool {
    s == DEFAULT_SHADOW
}

/// A validated datum. Local sector `i` is named after node `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MTTDatum {
    pub nodes: Vec<String>,
    pub bulk_sector: SectorId,
    pub local_sectors: Vec<SectorId>,
    pub phi: Vec<TransportKernel>,
    pub psi: Vec<TransportKernel>,
    pub probes: Vec<BoundedComplex>,
    pub shadow_sector: SectorId,
    pub shadow_kernels: Vec<TransportKernel>,
    pub shadow_objects: Vec<BoundedComplex>,
    pub support: Vec<Vec<bool>>,
    pub state: StatePackage,
    compatibility: Vec<ChainMap>,
}

/// Unvalidated parts, used by generators to assemble a datum.
#[derive(Clone, Debug)]
pub struct DatumParts {
    pub nodes: Vec<String>,
    pub phi: Vec<BoundedComplex>,
    pub psi: Vec<BoundedComplex>,
    pub probes: Vec<BoundedComplex>,
    pub shadow_kernels: Vec<BoundedComplex>,
    pub shadow_objects: Vec<BoundedComplex>,
    pub support: Vec<Vec<bool>>,
    pub c_sigma: Vec<Rational>,
}

impl DatumParts {
    /// Wires the kernels with the standard labels and sectors, then validates.
    pub fn build(self) -> Result<MTTDatum, DatumError> {
        let bulk = default_bulk();
        let shadow = default_shadow();
        let n = &self.nodes;
        let kernels = |ks: Vec<BoundedComplex>, name: &str, to_bulk: Option<bool>| {
            ks.into_iter()
                .enumerate()
                .map(|(i, k)| {
                    let (src, tgt) = match to_bulk {
                        Some(true) => (n[i].clone(), bulk.clone()),
                        Some(false) => (bulk.clone(), n[i].clone()),
                        None => (n[i].clone(), shadow.clone()),
                    };
                    KernelRepr::from(&TransportKernel::new(
                        k,
                        format!("{name}_{}", i + 1),
                        src,
                        tgt,
                    ))
                })
                .collect()
        };
        let file = DatumFile {
            bulk_sector: bulk.clone(),
            shadow_sector: shadow.clone(),
            phi: kernels(self.phi, "Phi", Some(true)),
            psi: kernels(self.psi, "Psi", Some(false)),
            probes: self.probes.iter().map(ComplexRepr::from).collect(),
            shadow_kernels: kernels(self.shadow_kernels, "Sh", None),
            shadow_objects: self.shadow_objects.iter().map(ComplexRepr::from).collect(),
            support: self
                .support
                .iter()
                .map(|row| row.iter().map(|&b| b as u8).collect())
                .collect(),
            state: StatePackage {
                vertices: n.iter().map(|v| format!("v_{v}")).collect(),
                basis_labels: (1..=n.len()).map(|k| format!("e_{k}")).collect(),
                c_sigma: self.c_sigma,
            },
            nodes: self.nodes,
        };
        MTTDatum::from_file(file)
    }
}

impl MTTDatum {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Parses and validates a datum file.
    pub fn load(path: impl AsRef<Path>) -> Result<MTTDatum, DatumError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| DatumError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<MTTDatum, DatumError> {
        let file: DatumFile = serde_json::from_str(text).map_err(|e| {
            DatumError::Invalid(vec![Diagnostic::new(
                DiagnosticKind::Parse,
                format!("line {}, column {}", e.line(), e.column()),
                e.to_string(),
            )])
        })?;
        Self::from_file(file)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_file()).expect("datum serializes");
        s.push('\n');
        s
    }

    pub fn to_file(&self) -> DatumFile {
        DatumFile {
            nodes: self.nodes.clone(),
            bulk_sector: self.bulk_sector.clone(),
            shadow_sector: self.shadow_sector.clone(),
            phi: self.phi.iter().map(KernelRepr::from).collect(),
            psi: self.psi.iter().map(KernelRepr::from).collect(),
            probes: self.probes.iter().map(ComplexRepr::from).collect(),
            shadow_kernels: self.shadow_kernels.iter().map(KernelRepr::from).collect(),
            shadow_objects: self.shadow_objects.iter().map(ComplexRepr::from).collect(),
            support: self
                .support
                .iter()
                .map(|row| row.iter().map(|&b| b as u8).collect())
                .collect(),
            state: self.state.clone(),
        }
    }

    /// Full validation: shapes, `d∘d = 0`, wiring, and probe/shadow
    /// compatibility, collecting every problem found.
    pub fn from_file(file: DatumFile) -> Result<MTTDatum, DatumError> {
        use DiagnosticKind::*;
        let mut diags = Vec::new();
        let r = file.nodes.len();
        if r == 0 {
            diags.push(Diagnostic::new(Validation, "nodes", "at least one node is required"));
        }
        let mut seen = BTreeSet::new();
        for (i, node) in file.nodes.iter().enumerate() {
            if !seen.insert(node) {
                diags.push(Diagnostic::new(
                    Validation,
                    format!("nodes[{i}]"),
                    format!("duplicate node id {node:?}"),
                ));
            }
            if *node == file.bulk_sector || *node == file.shadow_sector {
                diags.push(Diagnostic::new(
                    Wiring,
                    format!("nodes[{i}]"),
                    format!("node id {node:?} collides with a global sector"),
                ));
            }
        }
        for (name, len) in [
            ("phi", file.phi.len()),
            ("psi", file.psi.len()),
            ("probes", file.probes.len()),
            ("shadow_kernels", file.shadow_kernels.len()),
            ("shadow_objects", file.shadow_objects.len()),
            ("support", file.support.len()),
            ("state.vertices", file.state.vertices.len()),
            ("state.basis_labels", file.state.basis_labels.len()),
            ("state.c_sigma", file.state.c_sigma.len()),
        ] {
            if len != r {
                diags.push(Diagnostic::new(
                    Validation,
                    name,
                    format!("expected {r} entries, found {len}"),
                ));
            }
        }
        let mut support = Vec::new();
        for (i, row) in file.support.iter().enumerate() {
            if row.len() != r {
                diags.push(Diagnostic::new(
                    Validation,
                    format!("support[{i}]"),
                    format!("expected {r} entries, found {}", row.len()),
                ));
            }
            for (j, &b) in row.iter().enumerate() {
                if b > 1 {
                    diags.push(Diagnostic::new(
                        Validation,
                        format!("support[{i}][{j}]"),
                        format!("entry must be 0 or 1, found {b}"),
                    ));
                }
            }
            support.push(row.iter().map(|&b| b == 1).collect::<Vec<_>>());
        }

        let node = |i: usize| file.nodes.get(i).cloned().unwrap_or_default();
        let mut load_kernels = |field: &str,
                                reprs: &[KernelRepr],
                                wiring: &dyn Fn(usize) -> (SectorId, SectorId)| {
            let mut out = Vec::new();
            for (i, repr) in reprs.iter().enumerate() {
                let path = format!("{field}[{i}]");
                let (src, tgt) = wiring(i);
                if repr.source != src || repr.target != tgt {
                    diags.push(Diagnostic::new(
                        Wiring,
                        path.clone(),
                        format!(
                            "kernel {} goes {:?} → {:?}, expected {src:?} → {tgt:?}",
                            repr.label, repr.source, repr.target
                        ),
                    ));
                }
                match repr.clone().into_kernel() {
                    Ok(k) => out.push(k),
                    Err(e) => diags.push(Diagnostic::new(Validation, path, e.to_string())),
                }
            }
            out
        };
        let bulk = file.bulk_sector.clone();
        let shadow = file.shadow_sector.clone();
        let phi = load_kernels("phi", &file.phi, &|i| (node(i), bulk.clone()));
        let psi = load_kernels("psi", &file.psi, &|i| (bulk.clone(), node(i)));
        let shadow_kernels =
            load_kernels("shadow_kernels", &file.shadow_kernels, &|i| (node(i), shadow.clone()));

        let mut load_complexes = |field: &str, reprs: &[ComplexRepr]| {
            let mut out = Vec::new();
            for (i, repr) in reprs.iter().enumerate() {
                match repr.clone().into_complex() {
                    Ok(c) => out.push(c),
                    Err(e) => diags.push(Diagnostic::new(
                        Validation,
                        format!("{field}[{i}]"),
                        e.to_string(),
                    )),
                }
            }
            out
        };
        let probes = load_complexes("probes", &file.probes);
        let shadow_objects = load_complexes("shadow_objects", &file.shadow_objects);

        if !diags.is_empty() {
            return Err(DatumError::Invalid(diags));
        }

        let compat: Vec<Result<ChainMap, Diagnostic>> = (0..r)
            .into_par_iter()
            .map(|j| {
                let image = shadow_kernels[j].apply_complex(&probes[j]);
                let field = format!("shadow_objects[{j}]");
                let hi = image.homology_dims();
                let hq = shadow_objects[j].homology_dims();
                let fail = |msg: String| Diagnostic::new(Compatibility, field.clone(), msg);
                if hi != hq {
                    return Err(fail(format!(
                        "node {:?}: Sh(L) has homology {} but Q has homology {}",
                        file.nodes[j],
                        format_dims(&hi),
                        format_dims(&hq)
                    )));
                }
                let q = quasi_iso_between(&image, &shadow_objects[j])
                    .ok_or_else(|| fail("no comparison map".into()))?;
                if q.check().is_err() || !is_quasi_iso(&q) {
                    return Err(fail(format!(
                        "node {:?}: comparison map Sh(L) → Q is not a quasi-isomorphism",
                        file.nodes[j]
                    )));
                }
                Ok(q)
            })
            .collect();
        let mut compatibility = Vec::new();
        for c in compat {
            match c {
                Ok(q) => compatibility.push(q),
                Err(d) => diags.push(d),
            }
        }
        if !diags.is_empty() {
            return Err(DatumError::Invalid(diags));
        }

        Ok(MTTDatum {
            local_sectors: file.nodes.clone(),
            nodes: file.nodes,
            bulk_sector: file.bulk_sector,
            phi,
            psi,
            probes,
            shadow_sector: file.shadow_sector,
            shadow_kernels,
            shadow_objects,
            support,
            state: file.state,
            compatibility,
        })
    }

    fn check_index(&self, i: usize) -> Result<(), ChannelError> {
        if i >= self.nodes.len() {
            return Err(ChannelError::IndexOutOfRange {
                index: i,
                nodes: self.nodes.len(),
            });
        }
        Ok(())
    }

    /// The verified quasi-isomorphism `Sh_j(L_j) → Q_j`.
    pub fn compatibility_map(&self, j: usize) -> &ChainMap {
        &self.compatibility[j]
    }

    /// `A_ij = Ψ_j ∘ Φ_i` (0-based indices).
    pub fn channel_kernel(&self, i: usize, j: usize) -> Result<TransportKernel, ChannelError> {
        self.check_index(i)?;
        self.check_index(j)?;
        Ok(self.psi[j].compose(&self.phi[i])?)
    }

    /// `A_ij(L_i)`.
    pub fn transported_probe(&self, i: usize, j: usize) -> Result<BoundedComplex, ChannelError> {
        Ok(self.channel_kernel(i, j)?.apply_complex(&self.probes[i]))
    }

    /// `H_ij = Hom(A_ij(L_i), L_j)`.
    pub fn interaction_complex(&self, i: usize, j: usize) -> Result<BoundedComplex, ChannelError> {
        Ok(hom_complex(&self.transported_probe(i, j)?, &self.probes[j]))
    }

    pub fn interaction_polynomial(&self, i: usize, j: usize) -> Result<LaurentPoly, ChannelError> {
        Ok(poincare_of(&self.interaction_complex(i, j)?))
    }

    /// `Sh_j(A_ij(L_i))`.
    pub fn shadow_image(&self, i: usize, j: usize) -> Result<BoundedComplex, ChannelError> {
        Ok(self.shadow_kernels[j].apply_complex(&self.transported_probe(i, j)?))
    }

    /// All `r²` channels, computed in parallel and ordered by `(i, j)`.
    pub fn graded_matrix(&self) -> GradedInteractionMatrix {
        let r = self.node_count();
        let flat: Vec<LaurentPoly> = (0..r * r)
            .into_par_iter()
            .map(|k| {
                self.interaction_polynomial(k / r, k % r)
                    .expect("indices are in range")
            })
            .collect();
        GradedInteractionMatrix {
            entries: flat.chunks(r).map(<[_]>::to_vec).collect(),
        }
    }

    pub fn inherited_package(&self) -> InheritedPackage {
        InheritedPackage::new(
            self.state.clone(),
            self.support_bits(),
            self.graded_matrix(),
        )
    }

    pub fn support_bits(&self) -> Vec<Vec<u8>> {
        self.support
            .iter()
            .map(|row| row.iter().map(|&b| b as u8).collect())
            .collect()
    }

    /// Maps induced on `H(Hom(A_ij X, Y))` by `f : X' → X` in sector `i`
    /// (by precomposition with `A_ij(f)`) and by `g : Y → Y'` in sector `j`
    /// (by postcomposition).
    pub fn induced_profunctor_maps(
        &self,
        i: usize,
        j: usize,
        f: &SectorMap,
        g: &SectorMap,
    ) -> Result<ProfunctorMaps, ChannelError> {
        let a = self.channel_kernel(i, j)?;
        let af = a.apply_to_map(f)?;
        if g.sector != self.local_sectors[j] {
            return Err(TransportError::Wiring {
                label: format!("target of channel ({}, {})", i + 1, j + 1),
                expected: self.local_sectors[j].clone(),
                found: g.sector.clone(),
            }
            .into());
        }
        let y = g.map.source();
        let contravariant = precompose(&af.map, y).induced_on_homology();
        let covariant = postcompose(af.map.target(), &g.map).induced_on_homology();
        Ok(ProfunctorMaps {
            contravariant,
            covariant,
        })
    }
}

fn format_dims(d: &BTreeMap<Degree, usize>) -> String {
    if d.is_empty() {
        return "0".into();
    }
    let parts: Vec<_> = d.iter().map(|(n, h)| format!("H^{n}={h}")).collect();
    parts.join(", ")
}

/// Degreewise matrices of the two induced maps, in the homology bases of the
/// relevant Hom complexes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfunctorMaps {
    pub contravariant: BTreeMap<Degree, RatMatrix>,
    pub covariant: BTreeMap<Degree, RatMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GradedInteractionMatrix {
    pub entries: Vec<Vec<LaurentPoly>>,
}

impl GradedInteractionMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.entries[i][j]
    }

    /// `N(i, j) = [P_ij ≠ 0]`.
    pub fn nonvanishing(&self) -> Vec<Vec<u8>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|p| !p.is_zero() as u8).collect())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InheritedPackage {
    pub state: StatePackage,
    pub support: Vec<Vec<u8>>,
    pub graded: GradedInteractionMatrix,
    /// `[w_tot, w_chi]` per channel.
    pub specializations: Vec<Vec<[i64; 2]>>,
    /// Derived `[P_ij ≠ 0]`, reported next to the input support.
    pub nonvanishing: Vec<Vec<u8>>,
}

impl InheritedPackage {
    pub fn new(state: StatePackage, support: Vec<Vec<u8>>, graded: GradedInteractionMatrix) -> Self {
        let specializations = graded
            .entries
            .iter()
            .map(|row| row.iter().map(|p| [p.w_tot(), p.w_chi()]).collect())
            .collect();
        InheritedPackage {
            state,
            support,
            nonvanishing: graded.nonvanishing(),
            graded,
            specializations,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("package serializes");
        s.push('\n');
        s
    }

    /// Shapes agree and the specializations match the polynomials.
    pub fn is_consistent(&self) -> bool {
        let r = self.graded.size();
        self.state.vertices.len() == r
            && self.support.len() == r
            && self.specializations.len() == r
            && self.graded.entries.iter().all(|row| row.len() == r)
            && self.graded.entries.iter().zip(&self.specializations).all(|(ps, ws)| {
                ps.len() == ws.len()
                    && ps.iter().zip(ws).all(|(p, w)| *w == [p.w_tot(), p.w_chi()])
            })
            && self.nonvanishing == self.graded.nonvanishing()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> BoundedComplex {
        BoundedComplex::concentrated(0, 1)
    }

    fn parts(r: usize) -> DatumParts {
        DatumParts {
            nodes: (1..=r).map(|k| format!("p{k}")).collect(),
            phi: vec![unit(); r],
            psi: vec![unit(); r],
            probes: vec![unit(); r],
            shadow_kernels: vec![unit(); r],
            shadow_objects: vec![unit(); r],
            support: vec![vec![true; r]; r],
            c_sigma: vec![Rational::one(); r],
        }
    }

    #[test]
    fn unit_datum() {
        let d = parts(1).build().unwrap();
        assert_eq!(d.transported_probe(0, 0).unwrap(), unit());
        assert_eq!(d.graded_matrix().entries, vec![vec![LaurentPoly::one()]]);
        assert!(matches!(
            d.interaction_polynomial(0, 1),
            Err(ChannelError::IndexOutOfRange { index: 1, nodes: 1 })
        ));
    }

    #[test]
    fn shifted_psi_shifts_the_probe() {
        let mut p = parts(2);
        p.psi[1] = BoundedComplex::concentrated(-1, 1);
        let d = p.build().unwrap();
        assert_eq!(
            d.transported_probe(0, 1).unwrap().homology_dims(),
            BTreeMap::from([(-1, 1)])
        );
        assert_eq!(d.interaction_polynomial(0, 1).unwrap(), LaurentPoly::monomial(1, 1));
    }

    #[test]
    fn json_roundtrip() {
        let d = parts(2).build().unwrap();
        let text = d.to_json();
        let back = MTTDatum::from_json(&text).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.to_json(), text);
        assert!(!text.contains("bulk_sector"));
        let pkg = d.inherited_package();
        assert!(pkg.is_consistent());
        let again: InheritedPackage = serde_json::from_str(&pkg.to_json()).unwrap();
        assert_eq!(again, pkg);
    }

    #[test]
    fn diagnostics_name_the_problem() {
        let d = parts(2).build().unwrap();
        let mut file = d.to_file();
        file.shadow_objects[1] = ComplexRepr::from(&BoundedComplex::concentrated(1, 1));
        let err = MTTDatum::from_file(file).unwrap_err().diagnostics();
        assert_eq!(err.len(), 1);
        assert_eq!(err[0].kind, DiagnosticKind::Compatibility);
        assert!(err[0].message.contains("\"p2\""));

        let mut file = d.to_file();
        file.psi[0].target = "p2".into();
        let err = MTTDatum::from_file(file).unwrap_err().diagnostics();
        assert_eq!(err[0].kind, DiagnosticKind::Wiring);
        assert_eq!(err[0].field, "psi[0]");

        let mut file = d.to_file();
        file.probes[0] = ComplexRepr {
            dims: BTreeMap::from([(0, 1), (1, 1), (2, 1)]),
            diffs: BTreeMap::from([
                (0, vec![vec![Rational::one()]]),
                (1, vec![vec![Rational::one()]]),
            ]),
        };
        let err = MTTDatum::from_file(file).unwrap_err().diagnostics();
        assert_eq!(err[0].field, "probes[0]");
        assert!(err[0].message.contains("d^0"), "{}", err[0].message);
    }

    #[test]
    fn profunctor_identities() {
        let d = parts(2).build().unwrap();
        let l = d.probes[0].clone();
        let f = SectorMap::new("p1", ChainMap::identity(&l));
        let g = SectorMap::new("p2", ChainMap::identity(&d.probes[1]));
        let maps = d.induced_profunctor_maps(0, 1, &f, &g).unwrap();
        for m in maps.contravariant.values().chain(maps.covariant.values()) {
            assert_eq!(*m, RatMatrix::identity(m.rows()));
        }
        let zero = SectorMap::new("p1", ChainMap::zero(&l, &l));
        let maps = d.induced_profunctor_maps(0, 1, &zero, &g).unwrap();
        assert!(maps.contravariant.values().all(RatMatrix::is_zero));
        let wrong = SectorMap::new("p2", ChainMap::identity(&l));
        assert!(d.induced_profunctor_maps(0, 1, &wrong, &g).is_err());
    }
}
