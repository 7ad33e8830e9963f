use std::path::PathBuf;

use clap::{Args, ValueEnum};

use tdvpsim::circuits::{build_family, load_circuit, Circuit, Entangler, Family, FamilySpec};
use tdvpsim::engine::{Probes, RunOutput};
use tdvpsim::mps::{InitialState, Mps};
use tdvpsim::tdvp::{run_circuit_tdvp, Scheme, TdvpConfig};
use tdvpsim::tebd::{run_circuit_tebd, TebdConfig};

use crate::{CliResult, Failure};

/// Benchmark circuit parameters. Couplings default to `J = h = g = 1`.
#[derive(Args, Debug, Clone)]
pub struct BuilderArgs {
    /// heisenberg1d, heisenberg1d-periodic, ising2d, qaoa or hea.
    #[arg(long, alias = "family")]
    pub builder: Option<Family>,
    /// Number of qubits (all families except ising2d).
    #[arg(long)]
    pub n: Option<usize>,
    /// Grid rows (ising2d).
    #[arg(long)]
    pub rows: Option<usize>,
    /// Grid columns (ising2d).
    #[arg(long)]
    pub cols: Option<usize>,
    /// Trotter steps, or layers for qaoa and hea.
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    #[arg(long, default_value_t = 0.1)]
    pub dt: f64,
    /// Coupling J.
    #[arg(long, default_value_t = 1.0)]
    pub coupling: f64,
    /// Longitudinal field h (Heisenberg) or transverse field g (Ising).
    #[arg(long, default_value_t = 1.0)]
    pub field: f64,
    /// Angle seed for qaoa and hea.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Entangling gate for hea: cz or cx.
    #[arg(long, default_value = "cz")]
    pub entangler: Entangler,
}

impl BuilderArgs {
    pub fn family(&self) -> CliResult<Family> {
        self.builder.ok_or_else(|| Failure::Input("--builder is required".into()))
    }

    pub fn spec(&self) -> CliResult<FamilySpec> {
        let family = self.family()?;
        let mut spec = match family {
            Family::Ising2d => {
                let (Some(rows), Some(cols)) = (self.rows, self.cols) else {
                    return Err(Failure::Input("ising2d needs --rows and --cols".into()));
                };
                FamilySpec::grid(rows, cols, self.steps)
            }
            f => {
                let n = self.n.ok_or_else(|| Failure::Input(format!("{f} needs --n")))?;
                FamilySpec::new(f, n, self.steps)
            }
        };
        spec.dt = self.dt;
        spec.coupling = self.coupling;
        spec.field = self.field;
        spec.seed = self.seed;
        spec.entangler = self.entangler;
        Ok(spec)
    }

    pub fn build(&self) -> CliResult<Circuit> {
        Ok(build_family(&self.spec()?)?)
    }
}

/// Label used in output file names, e.g. `heisenberg1d-n8` or `ising2d-7x7`.
pub fn spec_label(spec: &FamilySpec) -> String {
    match spec.family {
        Family::Ising2d => format!("{}-{}x{}", spec.family, spec.rows, spec.cols),
        f => format!("{f}-n{}", spec.n),
    }
}

#[derive(Args, Debug, Clone)]
pub struct CircuitSource {
    /// Circuit JSON file.
    #[arg(long, conflicts_with = "builder", required_unless_present = "builder")]
    pub circuit: Option<PathBuf>,
    #[command(flatten)]
    pub builder: BuilderArgs,
}

pub struct LoadedCircuit {
    pub name: String,
    pub circuit: Circuit,
    pub family: Option<Family>,
}

impl CircuitSource {
    pub fn load(&self) -> CliResult<LoadedCircuit> {
        match &self.circuit {
            Some(path) => {
                let circuit = load_circuit(path)?;
                let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "circuit".into());
                Ok(LoadedCircuit { name, circuit, family: None })
            }
            None => {
                let spec = self.builder.spec()?;
                Ok(LoadedCircuit { name: spec_label(&spec), circuit: build_family(&spec)?, family: Some(spec.family) })
            }
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum EngineChoice {
    Tebd,
    Tdvp,
    Both,
}

impl EngineChoice {
    pub fn kinds(self) -> &'static [EngineKind] {
        match self {
            EngineChoice::Tebd => &[EngineKind::Tebd],
            EngineChoice::Tdvp => &[EngineKind::Tdvp],
            EngineChoice::Both => &[EngineKind::Tebd, EngineKind::Tdvp],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EngineKind {
    Tebd,
    Tdvp,
}

impl EngineKind {
    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Tebd => "tebd",
            EngineKind::Tdvp => "tdvp",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeChoice {
    TwoSite,
    OneSite,
}

#[derive(Args, Debug, Clone)]
pub struct EngineArgs {
    #[arg(long, value_enum, default_value_t = EngineChoice::Both)]
    pub engine: EngineChoice,
    /// Bond dimension cap; unbounded when omitted.
    #[arg(long)]
    pub chi_max: Option<usize>,
    /// Relative singular-value cutoff.
    #[arg(long, default_value_t = 1e-12)]
    pub s_max: f64,
    /// Initial product state: zeros, plus or neel. Defaults to neel for the
    /// Heisenberg families and zeros otherwise.
    #[arg(long)]
    pub init: Option<InitialState>,
    /// Left site of the recorded ⟨X_c X_{c+1}⟩; defaults to floor(N/2).
    #[arg(long)]
    pub correlator_site: Option<usize>,
    #[arg(long, value_enum, default_value_t = SchemeChoice::TwoSite)]
    pub scheme: SchemeChoice,
    /// TDVP sweeps per gate.
    #[arg(long, default_value_t = 1)]
    pub sweeps: usize,
    /// Skip the basis expansion before long-range TDVP gates.
    #[arg(long)]
    pub no_expansion: bool,
    #[arg(long, default_value_t = 25)]
    pub krylov_max: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub krylov_tol: f64,
}

impl EngineArgs {
    pub fn chi_max(&self) -> usize {
        self.chi_max.unwrap_or(usize::MAX)
    }

    pub fn tebd_config(&self) -> CliResult<TebdConfig> {
        Ok(TebdConfig::new(self.s_max, self.chi_max())?)
    }

    pub fn tdvp_config(&self) -> CliResult<TdvpConfig> {
        let cfg = TdvpConfig {
            s_max: self.s_max,
            chi_max: self.chi_max(),
            krylov_max: self.krylov_max,
            krylov_tol: self.krylov_tol,
            sweeps: self.sweeps,
            scheme: match self.scheme {
                SchemeChoice::TwoSite => Scheme::TwoSite,
                SchemeChoice::OneSite => Scheme::OneSite,
            },
            expansion: !self.no_expansion,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn initial_state(&self, family: Option<Family>, num_qubits: usize) -> CliResult<Mps> {
        let init = self.init.or(family.map(Family::default_initial_state)).unwrap_or_default();
        Ok(init.build(num_qubits)?)
    }

    pub fn probes(&self) -> Probes {
        Probes { correlator_site: self.correlator_site, track_norm: false }
    }

    pub fn run(&self, kind: EngineKind, circuit: &Circuit, psi0: &Mps) -> CliResult<RunOutput> {
        let out = match kind {
            EngineKind::Tebd => run_circuit_tebd(circuit, psi0, &self.tebd_config()?, &self.probes())?,
            EngineKind::Tdvp => run_circuit_tdvp(circuit, psi0, &self.tdvp_config()?, &self.probes())?,
        };
        Ok(out)
    }
}
