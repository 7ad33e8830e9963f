use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tdvpsim::engine::Probes;
use tdvpsim::gates::ProductGenerator;
use tdvpsim::linalg::random_hermitian;
use tdvpsim::mps::Mps;
use tdvpsim::oracle::{fidelity, local_projection_residual, mps_to_dense, run_circuit_dense, MAX_PROJECTOR_QUBITS};
use tdvpsim::tdvp::{run_circuit_tdvp, TdvpConfig};
use tdvpsim::tebd::{run_circuit_tebd, TebdConfig};

use crate::options::BuilderArgs;
use crate::{CliResult, Failure};

/// Largest chain the dense check accepts.
pub const MAX_VERIFY_QUBITS: usize = 12;

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub builder: BuilderArgs,
    /// Required fidelity margin: both engines need `F >= 1 - tol`.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Bound on the relative local/global projector residual.
    #[arg(long, default_value_t = 1e-10)]
    pub projector_tol: f64,
    /// Random states in the projector check; 0 skips it.
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    /// Bond dimension of the random states in the projector check.
    #[arg(long, default_value_t = 4)]
    pub chi: usize,
}

fn report(label: &str, ok: bool, detail: String) -> bool {
    println!("{label:<22} {detail:<40} {}", if ok { "ok" } else { "VIOLATION" });
    ok
}

pub fn cmd_verify(args: &VerifyArgs) -> CliResult<()> {
    let spec = args.builder.spec()?;
    let n = spec.num_qubits();
    if n > MAX_VERIFY_QUBITS {
        return Err(Failure::Input(format!("verify is limited to N <= {MAX_VERIFY_QUBITS}, got {n}")));
    }
    if args.chi == 0 {
        return Err(Failure::Input("--chi must be >= 1".into()));
    }
    let circuit = tdvpsim::circuits::build_family(&spec)?;
    let psi0 = spec.family.default_initial_state().build(n)?;
    let reference = run_circuit_dense(&circuit, &mps_to_dense(&psi0)?)?;
    let mut all_ok = true;

    let tebd = run_circuit_tebd(&circuit, &psi0, &TebdConfig::default(), &Probes::default())?;
    let f = fidelity(&reference, &mps_to_dense(&tebd.state)?)?;
    all_ok &= report("tebd fidelity", f >= 1.0 - args.tol, format!("1 - F = {:.3e}, {} swaps", 1.0 - f, tebd.swap_count));

    let tdvp = run_circuit_tdvp(&circuit, &psi0, &TdvpConfig::default(), &Probes::default())?;
    let f = fidelity(&reference, &mps_to_dense(&tdvp.state)?)?;
    all_ok &= report("tdvp fidelity", f >= 1.0 - args.tol, format!("1 - F = {:.3e}, {} swaps", 1.0 - f, tdvp.swap_count));

    if args.trials > 0 {
        let m = n.min(MAX_PROJECTOR_QUBITS);
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let mut worst = 0.0f64;
        for _ in 0..args.trials {
            let psi = Mps::random(m, 2, args.chi, &mut rng);
            let q = rng.gen_range(1..=(m - 1).min(3));
            let k = rng.gen_range(1..=m - q);
            let gen = ProductGenerator {
                coefficient: rng.gen_range(-2.0..2.0),
                factor_left: random_hermitian(&mut rng, 2),
                factor_right: random_hermitian(&mut rng, 2),
                span: (k, k + q),
            };
            worst = worst.max(local_projection_residual(&psi, &gen)?);
        }
        all_ok &=
            report("projector residual", worst <= args.projector_tol, format!("max {worst:.3e} over {} states, N = {m}", args.trials));
    }

    if all_ok {
        Ok(())
    } else {
        Err(Failure::Tolerance("verification failed".into()))
    }
}
