use alloc::string::String;
use core::fmt;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The biquaternion has (numerically) vanishing norm.
    NonInvertible,
    /// Light-like displacement has no Minkowskian polar form.
    NullDisplacement,
    NotUnitNorm,
    NotHermitian,
    /// A generating function must not depend on the time coordinate.
    NotSpatial,
    /// A field was evaluated on its singular locus.
    OnSingularLocus,
    /// Truncated series requested outside its convergence domain.
    ConvergenceDomain,
    /// A finite-difference stencil reaches the singular locus of the field.
    StencilHitsSingularity,
    /// `-∂_w f` and `∇̄f` disagree: the field is not regular at the point.
    NotRegularHere,
    DegenerateJacobian,
    /// A quadrature node landed on (or too close to) a singularity.
    SingularityOnSurface,
    /// The surface is not admissible for the singular locus of the integrand.
    Inadmissible(&'static str),
    BadParameters(&'static str),
    BadGeometry(&'static str),
    /// Analytic and numerical residue estimates disagree.
    OrderMismatch { analytic: [f64; 2], numerical: [f64; 2] },
    /// Continuation of a multivalued factor jumped between two nodes.
    BranchJump,
    /// Integrand does not decay fast enough for the arc at infinity to vanish.
    NonDecaying,
    /// The supplied field does not satisfy the required regularity condition.
    RegularityViolation { residual: f64 },
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonInvertible => write!(f, "biquaternion is not invertible"),
            Error::NullDisplacement => write!(f, "null (light-like) displacement"),
            Error::NotUnitNorm => write!(f, "transformation biquaternion does not have unit norm"),
            Error::NotHermitian => write!(f, "argument is not a Hermitian biquaternion"),
            Error::NotSpatial => write!(f, "generating function depends on the time coordinate"),
            Error::OnSingularLocus => write!(f, "point lies on the singular locus"),
            Error::ConvergenceDomain => write!(f, "series evaluated outside its convergence domain"),
            Error::StencilHitsSingularity => {
                write!(f, "finite-difference stencil reaches the singular locus")
            }
            Error::NotRegularHere => write!(f, "field is not regular at this point"),
            Error::DegenerateJacobian => write!(f, "patch Jacobian is rank deficient"),
            Error::SingularityOnSurface => write!(f, "integrand singular on the surface"),
            Error::Inadmissible(why) => write!(f, "surface not admissible: {why}"),
            Error::BadParameters(why) => write!(f, "bad parameters: {why}"),
            Error::BadGeometry(why) => write!(f, "bad contour geometry: {why}"),
            Error::OrderMismatch { analytic, numerical } => write!(
                f,
                "pole order mismatch: analytic residue {}{:+}i, numerical {}{:+}i",
                analytic[0], analytic[1], numerical[0], numerical[1]
            ),
            Error::BranchJump => write!(f, "branch continuation is discontinuous"),
            Error::NonDecaying => write!(f, "integrand does not decay at infinity"),
            Error::RegularityViolation { residual } => {
                write!(f, "field violates the required regularity (residual {residual:e})")
            }
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
