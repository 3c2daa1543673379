//! One-degree-of-freedom states sampled on phase-space grids: wavefunctions,
//! Wigner grids and their transforms, and the kernel reconstruction used as
//! the brute-force positivity oracle.

mod axis;
mod fourier;
mod interp;
pub mod io;
mod kernel;
mod wavefunction;
mod wigner;

pub use axis::AxisGrid;
pub use fourier::{symplectic_fourier, CharacteristicFunction, GaussianCharacteristic, SymplecticFourier};
pub use kernel::{kernel_from_wigner, operator_spectrum_oracle, KernelMatrix, OracleSpectrum, ORACLE_TOL};
pub use wavefunction::{fock_state, fourier_transform, gaussian_state, PureState, WaveFunctionGrid};
pub use wigner::{
    fock_wigner, mix_grids, mixture_wigner, rescale, rescale_with_diagnostics, trace, wigner_gaussian, wigner_of_pure,
    wigner_of_pure_on, MixtureComponent, MixtureSpec, RescaleDiagnostics, WignerGrid,
};
