use super::Result;
use crate::qcore::{hermitian_expm, DensityMatrix, Operator, QcoreError, C64};

const UNITARY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OtocValue {
    /// `⟨W_τ† V† W_τ V⟩` with `W_τ = U_τ† W U_τ`.
    pub f_direct: C64,
    /// `⟨O_B† O_F⟩` with `O_F = W U V` and `O_B = U V U† W U`.
    pub f_paths: C64,
    /// `⟨[W_τ, V]† [W_τ, V]⟩` evaluated directly.
    pub commutator_sq: f64,
    /// `2(1 − Re F)`; equals `commutator_sq` only for unitary `W` and `V`.
    pub commutator_sq_from_f: f64,
    pub unitary_inputs: bool,
}

/// Out-of-time-order correlator at `tau`, averaged in `state` (maximally mixed by default).
pub fn otoc(
    h: &Operator,
    w: &Operator,
    v: &Operator,
    tau: f64,
    state: Option<&DensityMatrix>,
) -> Result<OtocValue> {
    let dim = h.dim();
    for d in [w.dim(), v.dim()].into_iter().chain(state.map(|s| s.dim())) {
        if d != dim {
            return Err(QcoreError::DimensionMismatch { expected: dim, found: d }.into());
        }
    }
    let expect = |op: &Operator| -> C64 {
        match state {
            Some(rho) => (rho.matrix() * op.matrix()).trace(),
            None => op.trace() / dim as f64,
        }
    };
    let u = hermitian_expm(h, tau)?;
    let u_dag = u.dagger();
    let w_tau = &(&u_dag * w) * &u;
    let v_dag = v.dagger();
    let direct_op = &(&(&w_tau.dagger() * &v_dag) * &w_tau) * v;
    let o_f = &(w * &u) * v;
    let o_b = &(&(&(&u * v) * &u_dag) * w) * &u;
    let comm = &(&w_tau * v) - &(v * &w_tau);
    let f_direct = expect(&direct_op);
    Ok(OtocValue {
        f_direct,
        f_paths: expect(&(&o_b.dagger() * &o_f)),
        commutator_sq: expect(&(&comm.dagger() * &comm)).re,
        commutator_sq_from_f: 2.0 * (1.0 - f_direct.re),
        unitary_inputs: w.is_unitary(UNITARY_TOL) && v.is_unitary(UNITARY_TOL),
    })
}
