//! Authored semantic mutants: five per operator class per PUT.
//!
//! Magnitudes are fixtures recorded in each description. The fifth entry of a
//! few classes is a deliberately over-injected artefact.

use super::{MutantKind, MutantRecord, OperatorClass};
use crate::kernels::*;
use OperatorClass::*;

struct Entry {
    op: OperatorClass,
    description: &'static str,
    program: Program,
    artefact: bool,
}

fn e(op: OperatorClass, description: &'static str, program: Program) -> Entry {
    Entry { op, description, program, artefact: false }
}

fn artefact(op: OperatorClass, description: &'static str, program: Program) -> Entry {
    Entry { op, description, program, artefact: true }
}

fn lorenz(f: impl FnOnce(&mut LorenzConfig)) -> Program {
    let mut c = LorenzConfig::default();
    f(&mut c);
    Program::Lorenz(c)
}

fn lorenz_fault(fault: LorenzFault) -> Program {
    lorenz(|c| c.fault = Some(fault))
}

fn lu(f: impl FnOnce(&mut LuConfig)) -> Program {
    let mut c = LuConfig::default();
    f(&mut c);
    Program::Lu(c)
}

fn lu_fault(fault: LuFault) -> Program {
    lu(|c| c.fault = Some(fault))
}

fn heat(f: impl FnOnce(&mut HeatConfig)) -> Program {
    let mut c = HeatConfig::default();
    f(&mut c);
    Program::Heat(c)
}

fn heat_fault(fault: HeatFault) -> Program {
    heat(|c| c.fault = Some(fault))
}

fn bb(f: impl FnOnce(&mut BetaBinomialConfig)) -> Program {
    let mut c = BetaBinomialConfig::default();
    f(&mut c);
    Program::BetaBinomial(c)
}

fn bb_fault(fault: BetaBinomialFault) -> Program {
    bb(|c| c.fault = Some(fault))
}

fn mcmc(f: impl FnOnce(&mut McmcConfig)) -> Program {
    let mut c = McmcConfig::default();
    f(&mut c);
    Program::Mcmc(c)
}

fn mcmc_fault(fault: McmcFault) -> Program {
    mcmc(|c| c.fault = Some(fault))
}

fn is(f: impl FnOnce(&mut ImportanceConfig)) -> Program {
    let mut c = ImportanceConfig::default();
    f(&mut c);
    Program::Importance(c)
}

fn is_fault(fault: ImportanceFault) -> Program {
    is(|c| c.fault = Some(fault))
}

fn gpr(f: impl FnOnce(&mut GprConfig)) -> Program {
    let mut c = GprConfig::default();
    f(&mut c);
    Program::Gpr(c)
}

fn gpr_fault(fault: GprFault) -> Program {
    gpr(|c| c.fault = Some(fault))
}

fn pce(f: impl FnOnce(&mut PceConfig)) -> Program {
    let mut c = PceConfig::default();
    f(&mut c);
    Program::Pce(c)
}

fn pce_fault(fault: PceFault) -> Program {
    pce(|c| c.fault = Some(fault))
}

fn surrogate(f: impl FnOnce(&mut MlpConfig)) -> Program {
    let mut c = MlpConfig::surrogate();
    f(&mut c);
    Program::Surrogate(c)
}

fn surrogate_fault(fault: MlpFault) -> Program {
    surrogate(|c| c.fault = Some(fault))
}

fn classifier(f: impl FnOnce(&mut MlpConfig)) -> Program {
    let mut c = MlpConfig::classifier();
    f(&mut c);
    Program::Classifier(c)
}

fn classifier_fault(fault: MlpFault) -> Program {
    classifier(|c| c.fault = Some(fault))
}

fn svm(f: impl FnOnce(&mut LinearClassifierConfig)) -> Program {
    let mut c = LinearClassifierConfig::svm();
    f(&mut c);
    Program::Svm(c)
}

fn svm_fault(fault: LinearFault) -> Program {
    svm(|c| c.fault = Some(fault))
}

fn logreg(f: impl FnOnce(&mut LinearClassifierConfig)) -> Program {
    let mut c = LinearClassifierConfig::logistic();
    f(&mut c);
    Program::LogReg(c)
}

fn logreg_fault(fault: LinearFault) -> Program {
    logreg(|c| c.fault = Some(fault))
}

fn entries(put: PutId) -> Vec<Entry> {
    match put {
        PutId::A1 => vec![
            e(CE, "epsilon drift 0.5 added to dx/dt", lorenz(|c| c.drift = 0.5)),
            e(CE, "initial y offset 0.5 breaks the mirror symmetry", lorenz(|c| c.y_offset = 0.5)),
            e(CE, "|x| replaces x in the y equation", lorenz_fault(LorenzFault::AbsCoupling)),
            e(CE, "forcing 0.05 x^2 added to dx/dt", lorenz_fault(LorenzFault::QuadraticForcing { coef: 0.05 })),
            artefact(CE, "over-injected: drift 0.2, y offset 0.3, z slope 0.1 and sigma 11 together", lorenz(|c| {
                c.drift = 0.2;
                c.y_offset = 0.3;
                c.z_slope = 0.1;
                c.sigma = 11.0;
            })),
            e(OS, "initial z grows with x (slope 2)", lorenz(|c| c.z_slope = 2.0)),
            e(OS, "initial y reversed (y = -x)", lorenz(|c| c.y_scale = -1.0)),
            e(OS, "x held fixed over the first 40% of the horizon", lorenz_fault(LorenzFault::FreezeX { from: 0.0, to: 0.4 })),
            e(OS, "x held fixed over the last half of the horizon", lorenz_fault(LorenzFault::FreezeX { from: 0.5, to: 1.0 })),
            e(OS, "rho lowered from 28 to 20", lorenz(|c| c.rho = 20.0)),
            e(HP, "RK4 replaced by a 1.5-order hybrid", lorenz(|c| c.integrator = Integrator::Hybrid)),
            e(HP, "RK4 replaced by Heun", lorenz(|c| c.integrator = Integrator::Heun)),
            e(HP, "last RK4 stage reuses the second-stage slope", lorenz(|c| c.integrator = Integrator::StaleStage)),
            e(HP, "step count ignores refinement", lorenz_fault(LorenzFault::FixedSteps)),
            e(HP, "state rounded to single precision each step", lorenz_fault(LorenzFault::SinglePrecision)),
            e(TF, "state-vector y/z swap at mid-horizon", lorenz_fault(LorenzFault::SwapYz { at: 0.5 })),
            e(TF, "RK4 replaced by Euler", lorenz(|c| c.integrator = Integrator::Euler)),
            e(TF, "z kicked by +2 at mid-horizon", lorenz_fault(LorenzFault::Kick { at: 0.5, size: 2.0 })),
            e(TF, "z damped by 2% every 10 steps", lorenz_fault(LorenzFault::Damp { every: 10, factor: 0.98 })),
            e(TF, "z reported one step early", lorenz_fault(LorenzFault::LaggedOutput)),
            e(SI, "horizon 0.5 -> 0.51", lorenz(|c| c.horizon = 0.51)),
            e(SI, "sigma 10 -> 10.5", lorenz(|c| c.sigma = 10.5)),
            e(SI, "beta 8/3 -> 2.7", lorenz(|c| c.beta = 2.7)),
            e(SI, "output rounded to 2 decimals", lorenz_fault(LorenzFault::RoundOutput { digits: 2 })),
            e(SI, "base step count 50 -> 10", lorenz(|c| c.base_steps = 10)),
        ],
        PutId::A2 => vec![
            e(CE, "elimination omits the k+1-th multiplier", lu_fault(LuFault::OmitMultiplier)),
            e(CE, "0.01 added to the scaled determinant", lu_fault(LuFault::OutputOffset { offset: 0.01 })),
            e(CE, "input scaling also applied to row n/2 as sqrt(x)", lu_fault(LuFault::ExtraRowScale { power: 0.5 })),
            e(CE, "row scaled by x^2 instead of x", lu(|c| c.row_power = 2.0)),
            e(CE, "coupling perturbation 1e-13 -> 1e-2", lu(|c| c.eta = 1e-2)),
            e(OS, "det replaced by sum(diag)", lu_fault(LuFault::SumDiagonal)),
            e(OS, "first elimination step adds instead of subtracting", lu_fault(LuFault::FlipFirstUpdate)),
            e(OS, "middle pivot dropped from the product", lu_fault(LuFault::DropMiddlePivot)),
            e(OS, "pivots of the first block squared", lu_fault(LuFault::SquareFirstBlock)),
            e(OS, "row scaled by 1/x", lu(|c| c.row_power = -1.0)),
            e(HP, "spacing stuck at the coarse grid", lu_fault(LuFault::StaleSpacing)),
            e(HP, "size grows linearly with level", lu_fault(LuFault::LinearRefinement)),
            e(HP, "spacing 1/n instead of 1/(n+1)", lu_fault(LuFault::SpacingOffByOne)),
            e(HP, "diagonal perturbation order h^2 -> h", lu(|c| c.diag_exponent = 1.0)),
            e(HP, "diagonal coefficient 4 -> 8", lu(|c| c.c = 8.0)),
            e(TF, "diagonal coefficient 4 -> 6", lu(|c| c.c = 6.0)),
            e(TF, "diagonal coefficient 4 -> 2", lu(|c| c.c = 2.0)),
            e(TF, "diagonal perturbation removed", lu(|c| c.c = 0.0)),
            e(TF, "diagonal perturbation order h^2 -> h^3", lu(|c| c.diag_exponent = 3.0)),
            e(TF, "input scaling also applied to row n/2 linearly", lu_fault(LuFault::ExtraRowScale { power: 1.0 })),
            e(SI, "partial pivoting degrades to no pivoting", lu(|c| c.pivot = PivotRule::None)),
            e(SI, "size ignores refinement", lu_fault(LuFault::FixedSize)),
            e(SI, "base size 8 -> 6", lu(|c| c.base_n = 6)),
            e(SI, "base size 8 -> 16", lu(|c| c.base_n = 16)),
            artefact(SI, "over-injected: no pivoting, eta 1e-3, c 3 and linear refinement together", lu(|c| {
                c.pivot = PivotRule::None;
                c.eta = 1e-3;
                c.c = 3.0;
                c.fault = Some(LuFault::LinearRefinement);
            })),
        ],
        PutId::A3 => vec![
            e(CE, "reaction term 0.1 u^2", heat_fault(HeatFault::QuadraticSource { coef: 0.1 })),
            e(CE, "leaky left boundary (weight 0.05)", heat_fault(HeatFault::LeakyBoundary { weight: 0.05 })),
            e(CE, "initial profile offset 0.01", heat_fault(HeatFault::InitialOffset { offset: 0.01 })),
            e(CE, "amplitude x - 0.05 (x - 0.5)^2", heat_fault(HeatFault::QuadraticAmplitude { coef: 0.05 })),
            e(CE, "saturating read-out u - 0.1 u^2", heat_fault(HeatFault::SaturatingReadout { coef: 0.1 })),
            e(OS, "every 7th time step negative", heat_fault(HeatFault::NegativeStep { every: 7 })),
            e(OS, "every 3rd time step negative", heat_fault(HeatFault::NegativeStep { every: 3 })),
            e(OS, "amplitude folds back above 1.2", heat_fault(HeatFault::FoldedAmplitude { at: 1.2 })),
            e(OS, "branch comparison flipped above 1.5", heat_fault(HeatFault::BranchFlip { above: 1.5 })),
            artefact(OS, "over-injected: folded amplitude, kappa 1.2, horizon 0.12 and 12 cells", heat(|c| {
                c.fault = Some(HeatFault::FoldedAmplitude { at: 1.0 });
                c.kappa = 1.2;
                c.horizon = 0.12;
                c.base_cells = 12;
            })),
            e(HP, "second-order stencil replaced by a first-order one", heat_fault(HeatFault::OneSidedStencil)),
            e(HP, "time steps do not refine", heat_fault(HeatFault::FixedTimeSteps)),
            e(HP, "time steps double per level", heat_fault(HeatFault::LinearTimeRefinement)),
            e(HP, "probe read one node right of the midpoint", heat_fault(HeatFault::OffsetProbe)),
            e(HP, "base cells 16 -> 12", heat(|c| c.base_cells = 12)),
            e(TF, "midpoint kicked by 0.1 x at mid-horizon", heat_fault(HeatFault::Kick { at: 0.5, size: 0.1 })),
            e(TF, "every 5th update skipped", heat_fault(HeatFault::SkippedUpdates { every: 5 })),
            e(TF, "one extra time step", heat_fault(HeatFault::ExtraStep)),
            e(TF, "midpoint kicked by 0.02 x at a quarter of the horizon", heat_fault(HeatFault::Kick { at: 0.25, size: 0.02 })),
            e(TF, "probe averages the two central nodes", heat_fault(HeatFault::AveragedProbe)),
            e(SI, "diffusivity 1 -> 1.05", heat(|c| c.kappa = 1.05)),
            e(SI, "horizon 0.1 -> 0.105", heat(|c| c.horizon = 0.105)),
            e(SI, "base time steps 64 -> 56", heat(|c| c.base_steps = 56)),
            e(SI, "base cells 16 -> 14", heat(|c| c.base_cells = 14)),
            e(SI, "diffusivity 1 -> 0.9", heat(|c| c.kappa = 0.9)),
        ],
        PutId::B1 => vec![
            e(CE, "posterior omits normalisation", bb_fault(BetaBinomialFault::OmitNormalisation)),
            e(CE, "successes counted as k + 0.5", bb_fault(BetaBinomialFault::ShiftedCount { shift: 0.5 })),
            e(CE, "one extra failure counted", bb_fault(BetaBinomialFault::ExtraFailures { extra: 1.0 })),
            e(CE, "prior alpha 2 -> 3", bb(|c| c.alpha = 3.0)),
            e(CE, "overshoot 0.05 past the data mean", bb_fault(BetaBinomialFault::Overshoot { coef: 0.05 })),
            e(OS, "data direction reversed", bb_fault(BetaBinomialFault::ReversedData)),
            e(OS, "successes folded to min(k, n - k)", bb_fault(BetaBinomialFault::FoldedCount)),
            e(OS, "successes enter squared", bb_fault(BetaBinomialFault::SquaredCount)),
            e(OS, "posterior mode reported instead of the mean", bb_fault(BetaBinomialFault::ModeInsteadOfMean)),
            e(OS, "overshoot 1.5 past the data mean", bb_fault(BetaBinomialFault::Overshoot { coef: 1.5 })),
            e(HP, "flat prior alpha = beta = 1", bb(|c| {
                c.alpha = 1.0;
                c.beta = 1.0;
            })),
            e(HP, "strong prior alpha = beta = 5", bb(|c| {
                c.alpha = 5.0;
                c.beta = 5.0;
            })),
            e(HP, "trials 20 -> 25", bb(|c| c.trials = 25.0)),
            e(HP, "data discounted by a 0.5 power prior", bb_fault(BetaBinomialFault::PowerPrior { factor: 0.5 })),
            artefact(HP, "over-injected: alpha 4, beta 1, trials 30 and a 0.8 power prior", bb(|c| {
                c.alpha = 4.0;
                c.beta = 1.0;
                c.trials = 30.0;
                c.fault = Some(BetaBinomialFault::PowerPrior { factor: 0.8 });
            })),
            e(TF, "data weight frozen across levels", bb_fault(BetaBinomialFault::StaleEvidence)),
            e(TF, "overshoot 0.2 past the data mean", bb_fault(BetaBinomialFault::Overshoot { coef: 0.2 })),
            e(TF, "three extra failures counted", bb_fault(BetaBinomialFault::ExtraFailures { extra: 3.0 })),
            e(TF, "successes counted as k + 2", bb_fault(BetaBinomialFault::ShiftedCount { shift: 2.0 })),
            e(TF, "asymmetric prior alpha 2.5, beta 1.5", bb(|c| {
                c.alpha = 2.5;
                c.beta = 1.5;
            })),
            e(SI, "data discounted by a 2x power prior", bb_fault(BetaBinomialFault::PowerPrior { factor: 2.0 })),
            e(SI, "prior beta 2 -> 2.5", bb(|c| c.beta = 2.5)),
            e(SI, "trials 20 -> 22", bb(|c| c.trials = 22.0)),
            e(SI, "overshoot 0.02 past the data mean", bb_fault(BetaBinomialFault::Overshoot { coef: 0.02 })),
            e(SI, "data discounted by a 0.9 power prior", bb_fault(BetaBinomialFault::PowerPrior { factor: 0.9 })),
        ],
        PutId::B2 => vec![
            e(CE, "chain starts at zero", mcmc_fault(McmcFault::ColdStart)),
            e(CE, "target centre scaled by 1.1", mcmc_fault(McmcFault::ScaledCentre { factor: 1.1 })),
            e(CE, "proposal drifts by 0.05", mcmc_fault(McmcFault::DriftingProposal { drift: 0.05 })),
            e(CE, "log-density loses its factor one half", mcmc_fault(McmcFault::MissingHalf)),
            e(CE, "first 200 states counted twice", mcmc_fault(McmcFault::DoubleCountedBurnIn { burn: 200 })),
            e(OS, "acceptance min(1, r) -> min(0.95, r)", mcmc_fault(McmcFault::AcceptanceCap { cap: 0.95 })),
            e(OS, "acceptance comparison flipped", mcmc_fault(McmcFault::FlippedComparison)),
            e(OS, "target centre scaled by -0.5", mcmc_fault(McmcFault::ScaledCentre { factor: -0.5 })),
            e(OS, "chain median reported", mcmc_fault(McmcFault::MedianEstimate)),
            e(OS, "output truncated to one decimal", mcmc_fault(McmcFault::RoundOutput { digits: 1 })),
            e(HP, "chain length ignores refinement", mcmc_fault(McmcFault::FixedLength)),
            e(HP, "chain length doubles per level", mcmc_fault(McmcFault::DoublingLength)),
            e(HP, "stale state every 2 steps", mcmc_fault(McmcFault::StaleState { every: 2 })),
            e(HP, "proposal step 1.0 -> 0.1", mcmc(|c| c.step = 0.1)),
            e(HP, "tempered acceptance r^0.5", mcmc_fault(McmcFault::TemperedAcceptance { power: 0.5 })),
            e(TF, "independent-sampling segment over 30-60% of the chain", mcmc_fault(McmcFault::IndependentSegment { from: 0.3, to: 0.6, scale: 1.0 })),
            e(TF, "acceptance min(1, r) -> min(0.5, r)", mcmc_fault(McmcFault::AcceptanceCap { cap: 0.5 })),
            e(TF, "proposal drifts by 0.5", mcmc_fault(McmcFault::DriftingProposal { drift: 0.5 })),
            e(TF, "target sd 1 -> 2", mcmc(|c| c.target_sd = 2.0)),
            artefact(TF, "over-injected: independent segment, step 3, length 500 and sd 1.5", mcmc(|c| {
                c.fault = Some(McmcFault::IndependentSegment { from: 0.1, to: 0.9, scale: 2.0 });
                c.step = 3.0;
                c.base_length = 500;
                c.target_sd = 1.5;
            })),
            e(SI, "stale state every 5 steps", mcmc_fault(McmcFault::StaleState { every: 5 })),
            e(SI, "chain length 1000 -> 250", mcmc(|c| c.base_length = 250)),
            e(SI, "first 50 states counted twice", mcmc_fault(McmcFault::DoubleCountedBurnIn { burn: 50 })),
            e(SI, "tempered acceptance r^2", mcmc_fault(McmcFault::TemperedAcceptance { power: 2.0 })),
            e(SI, "target sd 1 -> 0.7", mcmc(|c| c.target_sd = 0.7)),
        ],
        PutId::B3 => vec![
            e(CE, "proposal normaliser off by 10%", is_fault(ImportanceFault::WrongNormaliser { norm: 1.1 })),
            e(CE, "antithetic partners dropped", is_fault(ImportanceFault::NoAntithetic)),
            e(CE, "exp(x t) weighted as exp(x |t|)", is_fault(ImportanceFault::AbsoluteExponent)),
            e(CE, "antithetic members use their own density", is_fault(ImportanceFault::OddPairing)),
            e(CE, "control variate with coefficient 0.1", is_fault(ImportanceFault::BiasedControlVariate { coef: 0.1 })),
            e(OS, "half the pairs summed, full divisor", is_fault(ImportanceFault::HalfSum)),
            e(OS, "inverse transform constant skewed by 0.3", is_fault(ImportanceFault::SkewedInverse { a: 0.3 })),
            e(OS, "estimate scaled by 0.9", is_fault(ImportanceFault::ScaledEstimate { eps: -0.1 })),
            e(OS, "uniform draws weighted as proposal draws", is_fault(ImportanceFault::UniformDraws)),
            e(OS, "self-normalised estimator", is_fault(ImportanceFault::SelfNormalised)),
            e(HP, "sample count ignores refinement", is_fault(ImportanceFault::FixedSamples)),
            e(HP, "doubling N does not reduce variance (samples recycled)", is_fault(ImportanceFault::RecycledSamples)),
            e(HP, "pairs 500 -> 50", is(|c| c.base_pairs = 50)),
            e(HP, "proposal offset 0.5 -> 0.05", is(|c| c.offset = 0.05)),
            e(HP, "pairs 500 -> 20", is(|c| c.base_pairs = 20)),
            e(TF, "running estimate restarts halfway", is_fault(ImportanceFault::RestartHalfway)),
            e(TF, "proposal offset 0.5 -> 0.8", is(|c| c.offset = 0.8)),
            e(TF, "inverse transform constant skewed by 1.0", is_fault(ImportanceFault::SkewedInverse { a: 1.0 })),
            e(TF, "control variate with coefficient 1.0", is_fault(ImportanceFault::BiasedControlVariate { coef: 1.0 })),
            e(TF, "proposal normaliser off by 50%", is_fault(ImportanceFault::WrongNormaliser { norm: 1.5 })),
            e(SI, "estimate scaled by 1.003", is_fault(ImportanceFault::ScaledEstimate { eps: 0.003 })),
            e(SI, "estimate scaled by 1.01", is_fault(ImportanceFault::ScaledEstimate { eps: 0.01 })),
            e(SI, "pairs 500 -> 200", is(|c| c.base_pairs = 200)),
            e(SI, "proposal offset 0.5 -> 1.5", is(|c| c.offset = 1.5)),
            e(SI, "proposal normaliser off by 2%", is_fault(ImportanceFault::WrongNormaliser { norm: 1.02 })),
        ],
        PutId::C1 => vec![
            e(CE, "covariance omits the nugget", gpr_fault(GprFault::OmitNugget)),
            e(CE, "uncentred prior mean 0.1", gpr_fault(GprFault::UncentredPrior { mean: 0.1 })),
            e(CE, "training targets shifted by 0.1", gpr_fault(GprFault::TargetShift { shift: 0.1 })),
            e(CE, "rightmost training point dropped", gpr_fault(GprFault::DropEndpoint)),
            e(CE, "training inputs shifted by 0.05", gpr_fault(GprFault::ShiftedDesign { shift: 0.05 })),
            e(OS, "training targets shifted by 1.0", gpr_fault(GprFault::TargetShift { shift: 1.0 })),
            e(OS, "periodic kernel with period 1", gpr(|c| c.kernel = GprKernel::Periodic { period: 1.0 })),
            e(OS, "prediction uses a mismatched cross kernel", gpr_fault(GprFault::MismatchedCrossKernel)),
            e(OS, "length scale 1 -> 0.05", gpr(|c| c.length_scale = 0.05)),
            e(OS, "nugget 1e-5 -> 1", gpr(|c| c.nugget = 1.0)),
            e(HP, "training grid ignores refinement", gpr_fault(GprFault::FixedGrid)),
            e(HP, "one extra point per level", gpr_fault(GprFault::SlowRefinement)),
            e(HP, "nugget grows 16x per level", gpr_fault(GprFault::GrowingNugget)),
            e(HP, "Gaussian kernel", gpr(|c| c.kernel = GprKernel::Gaussian)),
            artefact(HP, "over-injected: Gaussian kernel, length 0.3, nugget 1e-2 and slow refinement", gpr(|c| {
                c.kernel = GprKernel::Gaussian;
                c.length_scale = 0.3;
                c.nugget = 1e-2;
                c.fault = Some(GprFault::SlowRefinement);
            })),
            e(TF, "training inputs shifted by -0.1", gpr_fault(GprFault::ShiftedDesign { shift: -0.1 })),
            e(TF, "final prediction conditions on every second point", gpr_fault(GprFault::HalfConditioning)),
            e(TF, "length scale 1 -> 3", gpr(|c| c.length_scale = 3.0)),
            e(TF, "training inputs shifted by 0.2", gpr_fault(GprFault::ShiftedDesign { shift: 0.2 })),
            e(TF, "nugget 1e-5 -> 1e-2", gpr(|c| c.nugget = 1e-2)),
            e(SI, "length scale switches to a coarse prior (0.1) at fine levels", gpr_fault(GprFault::CoarsePriorAtFine { scale: 0.1 })),
            e(SI, "fine levels keep the coarse weights", gpr_fault(GprFault::StaleWeights)),
            e(SI, "length scale switches to 5 at fine levels", gpr_fault(GprFault::CoarsePriorAtFine { scale: 5.0 })),
            e(SI, "base intervals 8 -> 4", gpr(|c| c.base_intervals = 4)),
            e(SI, "length scale 1 -> 0.5", gpr(|c| c.length_scale = 0.5)),
        ],
        PutId::C2 => vec![
            e(CE, "projection normalised by (2n+1)/2.2", pce_fault(PceFault::WrongNormalisation { denom: 2.2 })),
            e(CE, "spurious first-order coefficient 0.01", pce_fault(PceFault::OddLeak { c1: 0.01 })),
            e(CE, "quadrature nodes shifted by 0.01", pce_fault(PceFault::ShiftedNodes { shift: 0.01 })),
            e(CE, "mean term dropped", pce_fault(PceFault::DropMean)),
            e(CE, "projection normalised by (2n+1)/2.05", pce_fault(PceFault::WrongNormalisation { denom: 2.05 })),
            e(OS, "inversion in the high-order coefficient sort", pce_fault(PceFault::SwappedHighOrder)),
            e(OS, "second-order coefficient sign flipped", pce_fault(PceFault::FlippedQuadratic)),
            e(OS, "spurious first-order coefficient -0.3", pce_fault(PceFault::OddLeak { c1: -0.3 })),
            e(OS, "Chebyshev basis with Legendre coefficients", pce_fault(PceFault::ChebyshevBasis)),
            e(OS, "partial sums accumulated in reverse", pce_fault(PceFault::ReversedAccumulation)),
            e(HP, "degree ignores refinement", pce_fault(PceFault::FixedDegree)),
            e(HP, "degree grows by two per level", pce_fault(PceFault::SlowDegree)),
            e(HP, "under-resolved quadrature", pce_fault(PceFault::UnderResolvedQuadrature)),
            e(HP, "coefficients damped (rate 2)", pce_fault(PceFault::ExponentialDamping { rate: 2.0 })),
            e(HP, "base degree 4 -> 2", pce(|c| c.base_degree = 2)),
            e(TF, "Fejer averaging of the partial sums", pce_fault(PceFault::CesaroMean)),
            e(TF, "coefficients damped (rate 0.5)", pce_fault(PceFault::ExponentialDamping { rate: 0.5 })),
            e(TF, "projection normalised by (2n+1)/3", pce_fault(PceFault::WrongNormalisation { denom: 3.0 })),
            e(TF, "quadrature nodes shifted by 0.1", pce_fault(PceFault::ShiftedNodes { shift: 0.1 })),
            e(TF, "base degree 4 -> 6", pce(|c| c.base_degree = 6)),
            e(SI, "high-order terms retain low-order values", pce_fault(PceFault::StaleHighOrder { scale: 1.0 })),
            e(SI, "high-order terms retain scaled low-order values", pce_fault(PceFault::StaleHighOrder { scale: 0.5 })),
            e(SI, "fine projections use a perturbed target", pce_fault(PceFault::PerturbedFineTarget { eps: 0.05 })),
            e(SI, "base degree 4 -> 3", pce(|c| c.base_degree = 3)),
            e(SI, "quadrature nodes 64 -> 9", pce(|c| c.min_nodes = 9)),
        ],
        PutId::C3 => vec![
            e(CE, "hidden units get bias 0.1", surrogate_fault(MlpFault::HiddenBias { bias: 0.1 })),
            e(CE, "activation tanh + 0.1 tanh^2", surrogate_fault(MlpFault::EvenActivation { coef: 0.1 })),
            e(CE, "output offset 0.05", surrogate_fault(MlpFault::OutputOffset { offset: 0.05 })),
            e(CE, "output-weight gradient omitted", surrogate_fault(MlpFault::DropOutputGradient)),
            e(CE, "sine activation", surrogate_fault(MlpFault::SineActivation)),
            e(OS, "output reflected above 0.5", surrogate_fault(MlpFault::ReflectAbove { at: 0.5 })),
            e(OS, "target frequency 1 -> 2.5", surrogate_fault(MlpFault::TargetFrequency { freq: 2.5 })),
            e(OS, "output reflected above 1.0", surrogate_fault(MlpFault::ReflectAbove { at: 1.0 })),
            e(OS, "input-dependent gain 1 - 1.2 (x/w)^2", surrogate_fault(MlpFault::InputGain { coef: 1.2 })),
            e(OS, "hidden-weight gradient omitted", surrogate_fault(MlpFault::DropHiddenGradient)),
            e(HP, "epoch truncation at 20", surrogate_fault(MlpFault::EpochTruncation { epochs: 20 })),
            e(HP, "all members share initial weights", surrogate_fault(MlpFault::SharedInitialisation)),
            e(HP, "ensemble doubles per level", surrogate_fault(MlpFault::DoublingEnsemble)),
            e(HP, "learning rate 0.2 -> 0.02", surrogate(|c| c.learning_rate = 0.02)),
            e(HP, "fine ensembles report one member", surrogate_fault(MlpFault::FirstMemberAtFine)),
            e(TF, "slow phase shift in the target (0.002 per epoch)", surrogate_fault(MlpFault::PhaseShift { rate: 0.002 })),
            e(TF, "oscillating learning rate", surrogate_fault(MlpFault::OscillatingRate { period: 20, amp: 0.9 })),
            e(TF, "hidden unit 0 masked on alternate 25-epoch blocks", surrogate_fault(MlpFault::PeriodicMask { period: 25 })),
            e(TF, "heavy-ball momentum 0.8", surrogate_fault(MlpFault::Momentum { beta: 0.8 })),
            artefact(TF, "over-injected: phase shift, 8 hidden units, 150 epochs and lr 0.3", surrogate(|c| {
                c.fault = Some(MlpFault::PhaseShift { rate: 0.004 });
                c.hidden = 8;
                c.epochs = 150;
                c.learning_rate = 0.3;
            })),
            e(SI, "extra members trained for 10 epochs only", surrogate_fault(MlpFault::UndertrainedExtras { epochs: 10 })),
            e(SI, "labels smoothed 10% towards 0.5", surrogate_fault(MlpFault::SmoothedLabels { eps: 0.1, target: 0.5 })),
            e(SI, "training points 12 -> 6", surrogate(|c| c.train_points = 6)),
            e(SI, "init scale 0.8 -> 3", surrogate(|c| c.init_scale = 3.0)),
            e(SI, "extra members trained for 60 epochs only", surrogate_fault(MlpFault::UndertrainedExtras { epochs: 60 })),
        ],
        PutId::D1 => vec![
            e(CE, "backprop omits the hidden-weight gradient term", classifier_fault(MlpFault::DropHiddenGradient)),
            e(CE, "hidden units get bias 0.2", classifier_fault(MlpFault::HiddenBias { bias: 0.2 })),
            e(CE, "logit offset 0.1", classifier_fault(MlpFault::OutputOffset { offset: 0.1 })),
            e(CE, "activation tanh + 0.2 tanh^2", classifier_fault(MlpFault::EvenActivation { coef: 0.2 })),
            e(CE, "labels smoothed 10% towards 0.8", classifier_fault(MlpFault::SmoothedLabels { eps: 0.1, target: 0.8 })),
            e(OS, "sign flip near the decision boundary (reflect above 0.3)", classifier_fault(MlpFault::ReflectAbove { at: 0.3 })),
            e(OS, "input gain 1 - 1.5 (x/w)^2", classifier_fault(MlpFault::InputGain { coef: 1.5 })),
            e(OS, "output reflected above 1.5", classifier_fault(MlpFault::ReflectAbove { at: 1.5 })),
            e(OS, "output-weight gradient omitted", classifier_fault(MlpFault::DropOutputGradient)),
            e(OS, "sine activation", classifier_fault(MlpFault::SineActivation)),
            e(HP, "epoch truncation at 10", classifier_fault(MlpFault::EpochTruncation { epochs: 10 })),
            e(HP, "all members share initial weights", classifier_fault(MlpFault::SharedInitialisation)),
            e(HP, "ensemble doubles per level", classifier_fault(MlpFault::DoublingEnsemble)),
            e(HP, "learning rate 0.5 -> 0.05", classifier(|c| c.learning_rate = 0.05)),
            e(HP, "hidden units 6 -> 2", classifier(|c| c.hidden = 2)),
            e(TF, "periodic hidden-layer mask (period 25)", classifier_fault(MlpFault::PeriodicMask { period: 25 })),
            e(TF, "oscillating learning rate", classifier_fault(MlpFault::OscillatingRate { period: 20, amp: 0.9 })),
            e(TF, "slow phase shift in the labels", classifier_fault(MlpFault::PhaseShift { rate: 0.003 })),
            e(TF, "heavy-ball momentum 0.9", classifier_fault(MlpFault::Momentum { beta: 0.9 })),
            e(TF, "periodic hidden-layer mask (period 60)", classifier_fault(MlpFault::PeriodicMask { period: 60 })),
            e(SI, "extra members trained for 10 epochs only", classifier_fault(MlpFault::UndertrainedExtras { epochs: 10 })),
            e(SI, "fine ensembles report one member", classifier_fault(MlpFault::FirstMemberAtFine)),
            e(SI, "init scale 0.8 -> 3", classifier(|c| c.init_scale = 3.0)),
            e(SI, "training points 16 -> 8", classifier(|c| c.train_points = 8)),
            artefact(SI, "over-injected: undertrained extras, 4 hidden units, 100 epochs and lr 1", classifier(|c| {
                c.fault = Some(MlpFault::UndertrainedExtras { epochs: 30 });
                c.hidden = 4;
                c.epochs = 100;
                c.learning_rate = 1.0;
            })),
        ],
        PutId::D2 => vec![
            e(CE, "cubic feature replaced by an even one", svm_fault(LinearFault::EvenFeature)),
            e(CE, "positive class weighted 1.5", svm_fault(LinearFault::ClassWeight { weight: 1.5 })),
            e(CE, "training grid shifted by 0.05", svm_fault(LinearFault::ShiftedGrid { shift: 0.05 })),
            e(CE, "intercept pinned to 0.1", svm_fault(LinearFault::PinnedIntercept { bias: 0.1 })),
            e(CE, "left-endpoint training grid", svm_fault(LinearFault::LeftEndpoints)),
            e(OS, "sign flip near the decision boundary", svm_fault(LinearFault::SignFlipNearBoundary { band: 0.3 })),
            e(OS, "labels flipped on [0.5, 1.5]", svm_fault(LinearFault::LabelFlip { lo: 0.5, hi: 1.5 })),
            e(OS, "labels flipped on [1.5, 3]", svm_fault(LinearFault::LabelFlip { lo: 1.5, hi: 3.0 })),
            e(OS, "sign flip near the boundary (band 0.1)", svm_fault(LinearFault::SignFlipNearBoundary { band: 0.1 })),
            artefact(OS, "over-injected: label flip, lambda 1, 8 points and logistic-scale labels", svm(|c| {
                c.fault = Some(LinearFault::LabelFlip { lo: -1.0, hi: 0.0 });
                c.lambda = 1.0;
                c.base_points = 8;
                c.label_scale = 1.0;
            })),
            e(HP, "training grid ignores refinement", svm_fault(LinearFault::FixedGrid)),
            e(HP, "Newton stops at gradient 1e-2", svm_fault(LinearFault::LooseTolerance { tol: 1e-2 })),
            e(HP, "regulariser 0.1 -> 1", svm(|c| c.lambda = 1.0)),
            e(HP, "single damped Newton step", svm_fault(LinearFault::OneDampedStep { damping: 0.5 })),
            e(HP, "base points 16 -> 6", svm(|c| c.base_points = 6)),
            e(TF, "regulariser gradient omitted", svm_fault(LinearFault::DropRegulariserGradient)),
            e(TF, "labels clipped to [0.2, 0.8]", svm_fault(LinearFault::ClippedLabels { clip: 0.2 })),
            e(TF, "label scale 0.4 -> 0.6", svm(|c| c.label_scale = 0.6)),
            e(TF, "linear features only", svm(|c| c.cubic = false)),
            e(TF, "training range 3 -> 2", svm(|c| c.half_width = 2.0)),
            e(SI, "fine levels train on the central half", svm_fault(LinearFault::CentralHalfAtFine)),
            e(SI, "regulariser 10 at level 1", svm_fault(LinearFault::LargeRegularisationAt { level: 1, lambda: 10.0 })),
            e(SI, "regulariser 10 at level 2", svm_fault(LinearFault::LargeRegularisationAt { level: 2, lambda: 10.0 })),
            e(SI, "regulariser 0.1 -> 0.01", svm(|c| c.lambda = 0.01)),
            e(SI, "training grid shifted by 0.2", svm_fault(LinearFault::ShiftedGrid { shift: 0.2 })),
        ],
        PutId::D3 => vec![
            e(CE, "positive class weighted 1.3", logreg_fault(LinearFault::ClassWeight { weight: 1.3 })),
            e(CE, "intercept pinned to 0.2", logreg_fault(LinearFault::PinnedIntercept { bias: 0.2 })),
            e(CE, "left-endpoint training grid", logreg_fault(LinearFault::LeftEndpoints)),
            e(CE, "training grid shifted by 0.1", logreg_fault(LinearFault::ShiftedGrid { shift: 0.1 })),
            artefact(CE, "over-injected: class weight 2, lambda 0.5, 8 points and range 2", logreg(|c| {
                c.fault = Some(LinearFault::ClassWeight { weight: 2.0 });
                c.lambda = 0.5;
                c.base_points = 8;
                c.half_width = 2.0;
            })),
            e(OS, "output complemented above 1", logreg_fault(LinearFault::ComplementAbove { at: 1.0 })),
            e(OS, "labels flipped on [0.5, 2]", logreg_fault(LinearFault::LabelFlip { lo: 0.5, hi: 2.0 })),
            e(OS, "output complemented above 2.5", logreg_fault(LinearFault::ComplementAbove { at: 2.5 })),
            e(OS, "labels flipped on [2, 3]", logreg_fault(LinearFault::LabelFlip { lo: 2.0, hi: 3.0 })),
            e(OS, "labels flipped on [-3, -2]", logreg_fault(LinearFault::LabelFlip { lo: -3.0, hi: -2.0 })),
            e(HP, "training grid ignores refinement", logreg_fault(LinearFault::FixedGrid)),
            e(HP, "Newton stops at gradient 1e-2", logreg_fault(LinearFault::LooseTolerance { tol: 1e-2 })),
            e(HP, "single damped Newton step", logreg_fault(LinearFault::OneDampedStep { damping: 1.0 })),
            e(HP, "regulariser 0.01 -> 1", logreg(|c| c.lambda = 1.0)),
            e(HP, "base points 16 -> 4", logreg(|c| c.base_points = 4)),
            e(TF, "regulariser gradient omitted", logreg_fault(LinearFault::DropRegulariserGradient)),
            e(TF, "labels clipped to [0.1, 0.9]", logreg_fault(LinearFault::ClippedLabels { clip: 0.1 })),
            e(TF, "label scale 1 -> 1.5", logreg(|c| c.label_scale = 1.5)),
            e(TF, "training range 3 -> 1.5", logreg(|c| c.half_width = 1.5)),
            e(TF, "Newton iterations 60 -> 2", logreg(|c| c.max_iter = 2)),
            e(SI, "regularisation occasionally large (10 at level 1)", logreg_fault(LinearFault::LargeRegularisationAt { level: 1, lambda: 10.0 })),
            e(SI, "regularisation large at level 2", logreg_fault(LinearFault::LargeRegularisationAt { level: 2, lambda: 10.0 })),
            e(SI, "fine levels train on the central half", logreg_fault(LinearFault::CentralHalfAtFine)),
            e(SI, "regularisation large at level 0", logreg_fault(LinearFault::LargeRegularisationAt { level: 0, lambda: 1.0 })),
            e(SI, "label scale 1 -> 0.8", logreg(|c| c.label_scale = 0.8)),
        ],
    }
}

/// The authored records of a PUT, numbered within each operator class.
pub(super) fn authored(put: PutId) -> Vec<MutantRecord> {
    let mut counters = [0usize; 5];
    entries(put)
        .into_iter()
        .map(|en| {
            counters[en.op.index()] += 1;
            MutantRecord {
                mutant_id: format!("{put}-{}-{}", en.op, counters[en.op.index()]),
                put,
                operator: en.op,
                kind: MutantKind::Semantic,
                semanticity: en.op.semanticity(),
                artefact_flag: en.artefact,
                description: en.description.into(),
                evaluator: en.program,
            }
        })
        .collect()
}
