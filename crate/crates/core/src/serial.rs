//! JSON schema for matrices over the shipped instances and for inversion
//! certificates.
//!
//! A matrix file is `{"n", "instance", "entries"}` where `entries` holds `n`
//! rows of instance payloads. Complex numbers are `[re, im]` pairs. Floats
//! are written in shortest round-trip form, so serialize → parse → serialize
//! is byte-identical.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::algebra::BanachAlgebra;
use crate::engine::{InversionCertificate, Method, PathTag};
use crate::error::SerialError;
use crate::instances::{
    HtDesc, HtKernel, ScalarDesc, ScalarMatrix, SwapDesc, SwapPair, UnitizedHt, Wiener, WienerDesc,
};
use crate::matrix::Matrix;
use crate::{DenseMatrix, C64};

pub type Complex = [f64; 2];

fn pack(z: C64) -> Complex {
    [z.re, z.im]
}

fn unpack(z: Complex) -> C64 {
    C64::new(z[0], z[1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceDescriptor {
    ScalarMatrix { k: usize },
    Wiener { degree: usize },
    HilleTamarkin { points: Vec<f64>, weights: Vec<f64> },
    SwapInvolution,
}

impl InstanceDescriptor {
    pub fn kind(&self) -> &'static str {
        match self {
            InstanceDescriptor::ScalarMatrix { .. } => "scalar_matrix",
            InstanceDescriptor::Wiener { .. } => "wiener",
            InstanceDescriptor::HilleTamarkin { .. } => "hille_tamarkin",
            InstanceDescriptor::SwapInvolution => "swap_involution",
        }
    }
}

/// An algebra whose elements have a JSON payload.
pub trait Payload: BanachAlgebra {
    const KIND: &'static str;
    type Repr: Serialize + DeserializeOwned + Clone;

    fn instance(desc: &Self::Desc) -> InstanceDescriptor;
    fn desc_of(instance: &InstanceDescriptor) -> Result<Self::Desc, SerialError>;
    fn to_repr(&self) -> Self::Repr;
    fn from_repr(desc: &Self::Desc, repr: Self::Repr) -> Result<Self, SerialError>;
}

fn wrong<T>(expected: &'static str, found: &InstanceDescriptor) -> Result<T, SerialError> {
    Err(SerialError::WrongInstance { expected, found: found.kind().into() })
}

impl Payload for ScalarMatrix {
    const KIND: &'static str = "scalar_matrix";
    type Repr = Vec<Vec<Complex>>;

    fn instance(desc: &ScalarDesc) -> InstanceDescriptor {
        InstanceDescriptor::ScalarMatrix { k: desc.k }
    }

    fn desc_of(instance: &InstanceDescriptor) -> Result<ScalarDesc, SerialError> {
        match instance {
            InstanceDescriptor::ScalarMatrix { k } if *k > 0 => Ok(ScalarDesc { k: *k }),
            InstanceDescriptor::ScalarMatrix { .. } => Err(SerialError::Shape("k must be positive".into())),
            other => wrong(Self::KIND, other),
        }
    }

    fn to_repr(&self) -> Self::Repr {
        let k = self.k();
        (0..k).map(|i| (0..k).map(|j| pack(self.entry(i, j))).collect()).collect()
    }

    fn from_repr(desc: &ScalarDesc, repr: Self::Repr) -> Result<Self, SerialError> {
        let k = desc.k;
        if repr.len() != k || repr.iter().any(|r| r.len() != k) {
            return Err(SerialError::Shape(format!("scalar entry must be {k}×{k}")));
        }
        Ok(ScalarMatrix::new(DenseMatrix::from_fn(k, k, |i, j| unpack(repr[i][j]))))
    }
}

impl Payload for Wiener {
    const KIND: &'static str = "wiener";
    /// Coefficients of `e^{iqt}` for `q = −d, …, d`.
    type Repr = Vec<Complex>;

    fn instance(desc: &WienerDesc) -> InstanceDescriptor {
        InstanceDescriptor::Wiener { degree: desc.degree }
    }

    fn desc_of(instance: &InstanceDescriptor) -> Result<WienerDesc, SerialError> {
        match instance {
            InstanceDescriptor::Wiener { degree } => Ok(WienerDesc { degree: *degree }),
            other => wrong(Self::KIND, other),
        }
    }

    fn to_repr(&self) -> Self::Repr {
        self.coefficients().iter().copied().map(pack).collect()
    }

    fn from_repr(desc: &WienerDesc, repr: Self::Repr) -> Result<Self, SerialError> {
        Ok(Wiener::new(desc.degree, repr.into_iter().map(unpack).collect())?)
    }
}

/// Scalar part plus the kernel sampled on the grid, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HtPayload {
    pub c: Complex,
    pub samples: Vec<Complex>,
}

impl Payload for UnitizedHt {
    const KIND: &'static str = "hille_tamarkin";
    type Repr = HtPayload;

    fn instance(desc: &HtDesc) -> InstanceDescriptor {
        InstanceDescriptor::HilleTamarkin { points: desc.points().to_vec(), weights: desc.weights().to_vec() }
    }

    fn desc_of(instance: &InstanceDescriptor) -> Result<HtDesc, SerialError> {
        match instance {
            InstanceDescriptor::HilleTamarkin { points, weights } => Ok(HtDesc::new(points.clone(), weights.clone())?),
            other => wrong(Self::KIND, other),
        }
    }

    fn to_repr(&self) -> HtPayload {
        let s = self.kernel().samples();
        let m = s.nrows();
        HtPayload { c: pack(self.scalar_part()), samples: (0..m * m).map(|idx| pack(s[(idx / m, idx % m)])).collect() }
    }

    fn from_repr(desc: &HtDesc, repr: HtPayload) -> Result<Self, SerialError> {
        let m = desc.m();
        if repr.samples.len() != m * m {
            return Err(SerialError::Shape(format!("kernel needs {} samples, got {}", m * m, repr.samples.len())));
        }
        let samples = DenseMatrix::from_fn(m, m, |i, j| unpack(repr.samples[i * m + j]));
        Ok(UnitizedHt::new(unpack(repr.c), HtKernel::new(desc.clone(), samples)?))
    }
}

impl Payload for SwapPair {
    const KIND: &'static str = "swap_involution";
    type Repr = [Complex; 2];

    fn instance(_desc: &SwapDesc) -> InstanceDescriptor {
        InstanceDescriptor::SwapInvolution
    }

    fn desc_of(instance: &InstanceDescriptor) -> Result<SwapDesc, SerialError> {
        match instance {
            InstanceDescriptor::SwapInvolution => Ok(SwapDesc),
            other => wrong(Self::KIND, other),
        }
    }

    fn to_repr(&self) -> Self::Repr {
        [pack(self.x), pack(self.y)]
    }

    fn from_repr(_desc: &SwapDesc, repr: Self::Repr) -> Result<Self, SerialError> {
        Ok(SwapPair::new(unpack(repr[0]), unpack(repr[1])))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile<R> {
    pub n: usize,
    pub instance: InstanceDescriptor,
    pub entries: Vec<Vec<R>>,
}

pub fn rows_of<A: Payload>(t: &Matrix<A>) -> Vec<Vec<A::Repr>> {
    (0..t.n()).map(|j| (0..t.n()).map(|k| t.get(j, k).to_repr()).collect()).collect()
}

fn matrix_from_rows<A: Payload>(n: usize, desc: &A::Desc, rows: Vec<Vec<A::Repr>>) -> Result<Matrix<A>, SerialError> {
    if n == 0 || rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(SerialError::Shape(format!("entries must form {n} rows of {n}")));
    }
    let entries = rows.into_iter().flatten().map(|r| A::from_repr(desc, r)).collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix::new(n, desc.clone(), entries)?)
}

impl<A: Payload> From<&Matrix<A>> for MatrixFile<A::Repr> {
    fn from(t: &Matrix<A>) -> Self {
        MatrixFile { n: t.n(), instance: A::instance(t.inner_desc()), entries: rows_of(t) }
    }
}

impl<R> MatrixFile<R> {
    pub fn into_matrix<A: Payload<Repr = R>>(self) -> Result<Matrix<A>, SerialError> {
        let desc = A::desc_of(&self.instance)?;
        matrix_from_rows(self.n, &desc, self.entries)
    }
}

pub fn matrix_to_json<A: Payload>(t: &Matrix<A>) -> String {
    serde_json::to_string_pretty(&MatrixFile::from(t)).expect("finite payloads serialize")
}

/// Parses a matrix file, checking the instance kind before the payloads.
pub fn matrix_from_json<A: Payload>(s: &str) -> Result<Matrix<A>, SerialError> {
    retype(serde_json::from_str(s)?)
}

/// A parsed matrix file of any shipped instance.
#[derive(Debug, Clone)]
pub enum AnyMatrix {
    Scalar(Matrix<ScalarMatrix>),
    Wiener(Matrix<Wiener>),
    HilleTamarkin(Matrix<UnitizedHt>),
    Swap(Matrix<SwapPair>),
}

fn retype<A: Payload>(file: MatrixFile<serde_json::Value>) -> Result<Matrix<A>, SerialError> {
    let desc = A::desc_of(&file.instance)?;
    let entries = file
        .entries
        .into_iter()
        .map(|row| row.into_iter().map(serde_json::from_value).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    matrix_from_rows(file.n, &desc, entries)
}

impl AnyMatrix {
    pub fn from_json(s: &str) -> Result<Self, SerialError> {
        let file: MatrixFile<serde_json::Value> = serde_json::from_str(s)?;
        Ok(match file.instance {
            InstanceDescriptor::ScalarMatrix { .. } => AnyMatrix::Scalar(retype(file)?),
            InstanceDescriptor::Wiener { .. } => AnyMatrix::Wiener(retype(file)?),
            InstanceDescriptor::HilleTamarkin { .. } => AnyMatrix::HilleTamarkin(retype(file)?),
            InstanceDescriptor::SwapInvolution => AnyMatrix::Swap(retype(file)?),
        })
    }

    pub fn to_json(&self) -> String {
        match self {
            AnyMatrix::Scalar(t) => matrix_to_json(t),
            AnyMatrix::Wiener(t) => matrix_to_json(t),
            AnyMatrix::HilleTamarkin(t) => matrix_to_json(t),
            AnyMatrix::Swap(t) => matrix_to_json(t),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            AnyMatrix::Scalar(t) => t.n(),
            AnyMatrix::Wiener(t) => t.n(),
            AnyMatrix::HilleTamarkin(t) => t.n(),
            AnyMatrix::Swap(t) => t.n(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorRecord<R> {
    pub label: String,
    pub v: Vec<Vec<R>>,
    pub w: Vec<Vec<R>>,
    pub v_inv: Vec<Vec<R>>,
    pub w_inv: Vec<Vec<R>>,
}

/// Audit form of an [`InversionCertificate`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateRecord<R> {
    pub method: Method,
    pub path: PathTag,
    pub instance: InstanceDescriptor,
    pub n: usize,
    pub tolerance: f64,
    pub residual_left: f64,
    pub residual_right: f64,
    pub replay_error: f64,
    pub perturbation: f64,
    pub padded_to: Option<usize>,
    pub nest_levels: usize,
    pub limit_terms: usize,
    pub lambdas: Vec<Complex>,
    pub input: Vec<Vec<R>>,
    pub source: Vec<Vec<R>>,
    pub reduced: Vec<Vec<R>>,
    pub inverse: Vec<Vec<R>>,
    pub factors: Vec<FactorRecord<R>>,
}

impl<A: Payload> From<&InversionCertificate<A>> for CertificateRecord<A::Repr> {
    fn from(c: &InversionCertificate<A>) -> Self {
        CertificateRecord {
            method: c.method,
            path: c.path,
            instance: A::instance(c.input.inner_desc()),
            n: c.input.n(),
            tolerance: c.tolerance,
            residual_left: c.residual_left,
            residual_right: c.residual_right,
            replay_error: c.replay_error().unwrap_or(f64::NAN),
            perturbation: c.perturbation(),
            padded_to: c.padded_to,
            nest_levels: c.nest_levels,
            limit_terms: c.limit_terms,
            lambdas: c.lambdas.iter().copied().map(pack).collect(),
            input: rows_of(&c.input),
            source: rows_of(&c.source),
            reduced: rows_of(&c.reduced),
            inverse: rows_of(&c.inverse),
            factors: c
                .factors
                .iter()
                .map(|f| FactorRecord {
                    label: f.label.clone(),
                    v: rows_of(&f.v),
                    w: rows_of(&f.w),
                    v_inv: rows_of(&f.v_inv),
                    w_inv: rows_of(&f.w_inv),
                })
                .collect(),
        }
    }
}

pub fn certificate_to_json<A: Payload>(c: &InversionCertificate<A>) -> String {
    serde_json::to_string_pretty(&CertificateRecord::from(c)).expect("certificate serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn scalar_round_trip_is_byte_identical() {
        let mut rng = rng_from_seed(17);
        let desc = ScalarDesc { k: 2 };
        let t: Matrix<ScalarMatrix> = Matrix::from_fn(3, &desc, |_, _| ScalarMatrix::random(&desc, &mut rng));
        let first = matrix_to_json(&t);
        let back: Matrix<ScalarMatrix> = matrix_from_json(&first).unwrap();
        assert_eq!(back, t);
        assert_eq!(matrix_to_json(&back), first);
    }

    #[test]
    fn dispatch_by_instance_kind() {
        let desc = WienerDesc { degree: 2 };
        let t = Matrix::identity(2, &desc);
        match AnyMatrix::from_json(&matrix_to_json(&t)).unwrap() {
            AnyMatrix::Wiener(w) => assert_eq!(w, t),
            other => panic!("parsed as {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_and_bad_shapes_are_rejected() {
        let extra = r#"{"n":1,"instance":{"kind":"swap_involution"},"entries":[[[[1,0],[1,0]]]],"extra":1}"#;
        assert!(AnyMatrix::from_json(extra).is_err());
        let short = r#"{"n":2,"instance":{"kind":"scalar_matrix","k":1},"entries":[[[[[1,0]]]]]}"#;
        assert!(matches!(AnyMatrix::from_json(short), Err(SerialError::Shape(_))));
        let wrong_kind = r#"{"n":1,"instance":{"kind":"wiener","degree":0},"entries":[[[[1,0]]]]}"#;
        assert!(matrix_from_json::<Wiener>(wrong_kind).is_ok());
        assert!(matches!(matrix_from_json::<ScalarMatrix>(wrong_kind), Err(SerialError::WrongInstance { .. })));
    }
}
