use serde::{Deserialize, Serialize};

use super::{cone, CMat, Real};

/// The two nondegenerate bilinear forms on `C^{2m}` used throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormKind {
    /// `J = [[0, I], [-I, 0]]`.
    Symplectic,
    /// `O = [[0, I], [I, 0]]`.
    SplitOrthogonal,
}

/// `J_{2m}` or `O_{2m}` with `m = half_dim`.
pub fn standard_form<T: Real>(kind: FormKind, half_dim: usize) -> CMat<T> {
    let n = 2 * half_dim;
    let mut out = CMat::<T>::zeros(n, n);
    for i in 0..half_dim {
        out[(i, half_dim + i)] = cone();
        out[(half_dim + i, i)] = match kind {
            FormKind::Symplectic => -cone::<T>(),
            FormKind::SplitOrthogonal => cone(),
        };
    }
    out
}
