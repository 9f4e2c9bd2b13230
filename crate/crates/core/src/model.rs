//! Physical model assembly: Hamiltonian and dissipator list in the collective
//! basis, with all rates and frequencies in units of the single-qubit decay
//! rate γ (and ħ = 1).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{Collective, HilbertSpace};
use crate::operators::{
    embed_fock, embed_qubit, fock_annihilation, fock_number, qubit_projector, OperatorMatrix,
};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054571817e-34;
/// Magnetic flux quantum Φ₀ = h/2e, Wb.
pub const FLUX_QUANTUM: f64 = 2.067833848e-15;

/// All model rates and couplings in units of γ, plus the Fock truncation.
///
/// `gamma_a = γ − γ₁₂` is the subradiant width and `gamma_s = γ + γ₁₂` the
/// superradiant one; when both derive from a shared bath they sum to 2.
/// `delta` is the drive detuning ω₀ − ω_L; cooling sits on the red sideband
/// `delta = nu + lambda` (see [`PhysicalParams::red_sideband_detuning`]).
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalParams {
    /// Resonator frequency ν.
    pub nu: f64,
    /// Resonator quality factor Q; the intrinsic damping is κ = ν/Q.
    pub quality: f64,
    /// Subradiant width Γ_a.
    pub gamma_a: f64,
    /// Superradiant width Γ_s.
    pub gamma_s: f64,
    /// Pure dephasing rate Γ_φ of each individual qubit.
    pub gamma_phi: f64,
    /// Lamb-Dicke parameter η.
    pub eta: f64,
    /// Drive Rabi frequency Ω.
    pub omega: f64,
    /// Collective level shift Λ between |s⟩ and |a⟩.
    pub lambda: f64,
    /// Drive detuning Δ = ω₀ − ω_L.
    pub delta: f64,
    /// Bath (initial thermal) occupation N_i of the resonator.
    pub n_thermal: f64,
    /// Fock-space truncation.
    pub fock_dim: usize,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            nu: 0.5,
            quality: 1e6,
            gamma_a: 0.1,
            gamma_s: 1.9,
            gamma_phi: 0.0,
            eta: 0.003,
            omega: 4.0,
            lambda: 500.0,
            delta: 500.5,
            n_thermal: 400.0,
            fock_dim: 20,
        }
    }
}

impl PhysicalParams {
    /// Sets the subradiant width and keeps the pair linked through the shared
    /// bath, Γ_s = 2 − Γ_a.
    pub fn with_subradiant_width(mut self, gamma_a: f64) -> Self {
        self.gamma_a = gamma_a;
        self.gamma_s = 2.0 - gamma_a;
        self
    }

    /// Retunes the drive onto the red sideband, Δ = ν + Λ.
    pub fn on_red_sideband(mut self) -> Self {
        self.delta = self.red_sideband_detuning();
        self
    }

    /// Red-sideband detuning Δ = ν + Λ, at which the drive removes one phonon
    /// per |g⟩ → |a⟩ transition.
    pub fn red_sideband_detuning(&self) -> f64 {
        self.nu + self.lambda
    }

    /// Intrinsic resonator damping κ = ν/Q.
    pub fn kappa(&self) -> f64 {
        self.nu / self.quality
    }

    /// Whether Γ_a + Γ_s = 2 holds to 10⁻¹², i.e. both widths derive from
    /// γ ± γ₁₂ with a single γ. An override breaking the link is allowed and
    /// only reported here, not rejected.
    pub fn widths_sum_to_two_gamma(&self) -> bool {
        (self.gamma_a + self.gamma_s - 2.0).abs() <= 1e-12
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.nu,
            self.quality,
            self.gamma_a,
            self.gamma_s,
            self.gamma_phi,
            self.eta,
            self.omega,
            self.lambda,
            self.delta,
            self.n_thermal,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParameter(
                "all parameters must be finite".into(),
            ));
        }
        if self.nu <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "nu must be > 0, got {}",
                self.nu
            )));
        }
        if self.quality <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "quality factor must be > 0, got {}",
                self.quality
            )));
        }
        if !(self.gamma_a > 0.0 && self.gamma_a <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma_a must lie in (0, 1], got {}",
                self.gamma_a
            )));
        }
        if self.gamma_s < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma_s must be >= 0, got {}",
                self.gamma_s
            )));
        }
        if self.gamma_phi < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma_phi must be >= 0, got {}",
                self.gamma_phi
            )));
        }
        if self.eta < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "eta must be >= 0, got {}",
                self.eta
            )));
        }
        if self.omega < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "omega must be >= 0, got {}",
                self.omega
            )));
        }
        if self.n_thermal < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "n_thermal must be >= 0, got {}",
                self.n_thermal
            )));
        }
        if self.fock_dim < 2 {
            return Err(Error::InvalidParameter(format!(
                "fock_dim must be >= 2, got {}",
                self.fock_dim
            )));
        }
        Ok(())
    }

    pub fn space(&self) -> Result<HilbertSpace> {
        HilbertSpace::new(self.fock_dim)
    }
}

/// Device-level quantities used only to derive the Lamb-Dicke parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct DeviceParams {
    /// Effective resonator mass, kg.
    pub mass_eff: f64,
    /// Angular resonator frequency, rad/s.
    pub angular_frequency: f64,
    /// In-plane magnetic field, T (sign allowed).
    pub b_field: f64,
    /// Resonator length, m.
    pub length: f64,
    /// Ratio ς of the qubit transition matrix elements picking up the
    /// displacement-induced flux (sign allowed).
    pub varsigma: f64,
}

/// Zero-point fluctuation X₀ = √(ħ/(2 M ν)) and Lamb-Dicke parameter
/// η = |ς B l X₀ · 2π/Φ₀| for a given device.
pub fn derive_lamb_dicke(d: &DeviceParams) -> Result<(f64, f64)> {
    if !(d.mass_eff > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "effective mass must be > 0, got {}",
            d.mass_eff
        )));
    }
    if !(d.angular_frequency > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "angular frequency must be > 0, got {}",
            d.angular_frequency
        )));
    }
    if !(d.length > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "length must be > 0, got {}",
            d.length
        )));
    }
    let x0 = (HBAR / (2.0 * d.mass_eff * d.angular_frequency)).sqrt();
    let eta = (d.varsigma * d.b_field * d.length * x0 * 2.0 * std::f64::consts::PI
        / FLUX_QUANTUM)
        .abs();
    Ok((x0, eta))
}

/// One Lindblad dissipator: a rate together with either a single collapse
/// operator (standard form) or an interfering pair (cross form).
#[derive(Clone, Debug)]
pub struct DissipatorSpec {
    pub rate: f64,
    pub form: DissipatorForm,
}

#[derive(Clone, Debug)]
pub enum DissipatorForm {
    /// 𝓛ρ = (rate/2)(2AρA† − A†Aρ − ρA†A)
    Standard(OperatorMatrix),
    /// 𝓛ρ = (rate/2)·Σ_{i≠j}(2A_iρA_j† − A_j†A_iρ − ρA_j†A_i)
    Cross(OperatorMatrix, OperatorMatrix),
}

impl DissipatorSpec {
    pub fn standard(rate: f64, op: OperatorMatrix) -> Self {
        Self {
            rate,
            form: DissipatorForm::Standard(op),
        }
    }

    pub fn cross(rate: f64, a1: OperatorMatrix, a2: OperatorMatrix) -> Self {
        Self {
            rate,
            form: DissipatorForm::Cross(a1, a2),
        }
    }

    pub fn dim(&self) -> usize {
        match &self.form {
            DissipatorForm::Standard(a) => a.nrows(),
            DissipatorForm::Cross(a, _) => a.nrows(),
        }
    }
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `H = ν b†b + Δ(R_ee − R_gg) + Λ(R_ss − R_aa)
///      + √2 Ω (R_es + R_sg + R_se + R_gs)
///      + √2 Ω η (b + b†)(R_ag + R_ga − R_ea − R_ae)`
/// on the composite space, rotating frame, units ħ = γ = 1.
pub fn build_hamiltonian(p: &PhysicalParams, space: &HilbertSpace) -> Result<OperatorMatrix> {
    p.validate()?;
    if space.fock_dim() != p.fock_dim {
        return Err(Error::DimensionMismatch(format!(
            "space truncation {} does not match params fock_dim {}",
            space.fock_dim(),
            p.fock_dim
        )));
    }
    use Collective::*;
    let sqrt2 = std::f64::consts::SQRT_2;

    let mut h = embed_fock(space, &fock_number(space)) * re(p.nu);
    h += embed_qubit(
        space,
        &(qubit_projector(Excited, Excited) - qubit_projector(Ground, Ground)),
    ) * re(p.delta);
    h += embed_qubit(
        space,
        &(qubit_projector(Sym, Sym) - qubit_projector(Anti, Anti)),
    ) * re(p.lambda);

    let drive = qubit_projector(Excited, Sym)
        + qubit_projector(Sym, Ground)
        + qubit_projector(Sym, Excited)
        + qubit_projector(Ground, Sym);
    h += embed_qubit(space, &drive) * re(sqrt2 * p.omega);

    let b = fock_annihilation(space);
    let position = &b + b.adjoint();
    let sideband = qubit_projector(Anti, Ground) + qubit_projector(Ground, Anti)
        - qubit_projector(Excited, Anti)
        - qubit_projector(Anti, Excited);
    h += sideband.kronecker(&position) * re(sqrt2 * p.omega * p.eta);

    Ok(h)
}

/// Single-qubit dephasing operators `|e_j⟩⟨e_j| − |g_j⟩⟨g_j|` (j = L, R)
/// rewritten in the collective basis:
/// `D_L = R_ee − R_gg + R_sa + R_as`, `D_R = R_ee − R_gg − R_sa − R_as`,
/// both embedded on the composite space.
pub fn dephasing_operators(space: &HilbertSpace) -> (OperatorMatrix, OperatorMatrix) {
    use Collective::*;
    let pop = qubit_projector(Excited, Excited) - qubit_projector(Ground, Ground);
    let exchange = qubit_projector(Sym, Anti) + qubit_projector(Anti, Sym);
    let d_left = embed_qubit(space, &(&pop + &exchange));
    let d_right = embed_qubit(space, &(&pop - &exchange));
    (d_left, d_right)
}

/// The complete dissipator list of the master equation, in a fixed order:
/// collective emission through |s⟩ and |a⟩ (2), their Lamb-Dicke sidebands
/// (2), the two interference cross terms, the two single-qubit dephasing
/// channels, and the thermal resonator bath (down and up). Rates that vanish
/// for the given parameters (e.g. dephasing at Γ_φ = 0) are still emitted
/// with rate 0 so the list always has exactly 10 entries.
pub fn build_dissipators(p: &PhysicalParams, space: &HilbertSpace) -> Result<Vec<DissipatorSpec>> {
    p.validate()?;
    if space.fock_dim() != p.fock_dim {
        return Err(Error::DimensionMismatch(format!(
            "space truncation {} does not match params fock_dim {}",
            space.fock_dim(),
            p.fock_dim
        )));
    }
    use Collective::*;

    let b = fock_annihilation(space);
    let position = &b + b.adjoint();

    // Bare collective jump operators (4×4), then their composite embeddings.
    let sym_jump = qubit_projector(Sym, Excited) + qubit_projector(Ground, Sym);
    let anti_jump = qubit_projector(Anti, Excited) - qubit_projector(Ground, Anti);

    let sym_c = embed_qubit(space, &sym_jump);
    let anti_c = embed_qubit(space, &anti_jump);
    // (R_ae − R_ga)(b + b†) = (R_ae − R_ga) ⊗ (b + b†), and likewise with the
    // opposite sign for (R_ga − R_ae).
    let anti_pos = anti_jump.kronecker(&position);
    let sym_pos = sym_jump.kronecker(&position);
    let neg_anti_pos = -&anti_pos;

    let (d_left, d_right) = dephasing_operators(space);

    let kappa = p.kappa();
    let b_c = embed_fock(space, &b);
    let b_dag_c = embed_fock(space, &b.adjoint());

    let eta2 = p.eta * p.eta;
    Ok(vec![
        DissipatorSpec::standard(p.gamma_s, sym_c.clone()),
        DissipatorSpec::standard(p.gamma_a, anti_c.clone()),
        DissipatorSpec::standard(p.gamma_s * eta2, anti_pos),
        DissipatorSpec::standard(p.gamma_a * eta2, sym_pos.clone()),
        DissipatorSpec::cross(p.gamma_s * p.eta, neg_anti_pos.clone(), sym_c),
        DissipatorSpec::cross(p.gamma_a * p.eta, sym_pos, neg_anti_pos),
        DissipatorSpec::standard(p.gamma_phi / 2.0, d_left),
        DissipatorSpec::standard(p.gamma_phi / 2.0, d_right),
        DissipatorSpec::standard((p.n_thermal + 1.0) * kappa, b_c),
        DissipatorSpec::standard(p.n_thermal * kappa, b_dag_c),
    ])
}
