//! Open-system evolution of a single robot qubit: propagate a superposed
//! state under a σ_z Hamiltonian with an amplitude-damping channel, print
//! the population trajectory, and evaluate the stability indicator
//! between consecutive snapshots.
//!
//! Run with `cargo run -p qswarm --example lindblad_stability`.

use num_complex::Complex64;
use qswarm::dynamics::{
    hamiltonian_sigma_z, lindblad_generator, propagate_lindblad, stability_indicator, Dissipator,
};
use qswarm::qcore::{CMatrix, DensityMatrix, Ket};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let h = hamiltonian_sigma_z(1.0)?;

    // Amplitude damping: |1⟩ decays to |0⟩ at rate γ.
    let mut lower = CMatrix::zeros(2, 2);
    lower[(0, 1)] = Complex64::new(1.0, 0.0);
    let damping = Dissipator::new(lower, 0.25)?;
    let channels = [damping];

    let start = Ket::normalized(vec![
        Complex64::new(0.6, 0.0),
        Complex64::new(0.8, 0.0),
    ])?;
    let mut rho = DensityMatrix::from_pure(&start);

    println!("{:>6}  {:>10}  {:>10}  {:>12}", "t", "P(0)", "P(1)", "coherence");
    let dt = 0.01;
    let step = 0.5;
    let mut snapshots = vec![rho.clone()];
    for k in 0..=8 {
        let t = k as f64 * step;
        if k > 0 {
            rho = propagate_lindblad(&rho, &h, &channels, step, dt)?;
            snapshots.push(rho.clone());
        }
        let m = rho.matrix();
        println!(
            "{:>6.2}  {:>10.6}  {:>10.6}  {:>12.6}",
            t,
            m[(0, 0)].re,
            m[(1, 1)].re,
            m[(0, 1)].norm()
        );
    }

    // The generator of a trace-preserving semigroup maps states to
    // traceless directions; worth seeing once with real numbers.
    let gen = lindblad_generator(snapshots.last().unwrap(), &h, &channels)?;
    println!("\n|tr ℒ(ρ_final)| = {:.3e}", gen.trace().norm());

    // The generator maps Hermitian inputs to Hermitian outputs — the jump
    // arrangement Lᵀ ρ L* satisfies (Lᵀ ρ L*)† = Lᵀ ρ L* for ANY L — so the
    // indicator, a trace of two Hermitian factors, is real for every valid
    // density pair. Its sign rule reads the imaginary part, which is
    // therefore identically zero here: the verdict is structurally
    // Indeterminate on physical inputs. What does carry information is the
    // real part: ρ₁ − ρ₀ ≈ Δt·ℒ(ρ), so the value ≈ Δt·‖ℒ(ρ)‖² tracks the
    // squared residual motion and decays as the state settles.
    println!("\nstability indicator between consecutive snapshots:");
    for w in snapshots.windows(2) {
        let report = stability_indicator(&w[0], &w[1], &h, &channels)?;
        println!(
            "  value = {:+.6e} {:+.6e}i  ->  {:?}",
            report.value.re, report.value.im, report.verdict
        );
    }

    Ok(())
}
