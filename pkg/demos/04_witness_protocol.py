"""The invasiveness witness protocol on the ideal and noisy dimer.

Runs the main experiment (with/without the middle pulse), the n+1
control experiments, and the inequality evaluation.  Shows the ideal
violation, the effect of uniform dephasing, classical-input soundness,
and control extraction from Gibbs-state observations.
"""

import numpy as np

from excitonspec import (
    ClassicalMixture,
    DephasingModel,
    DimerParams,
    ExperimentSpec,
    ProtocolConfig,
    PulseEvent,
    build_dimer,
    run_main_experiment,
    run_protocol,
)

model = build_dimer(DimerParams(10.0, 9.0, 0.5, 1.0, 0.8))
pulses = (PulseEvent(0.0, k_sign=-1), PulseEvent(0.7, k_sign=1), PulseEvent(1.15, k_sign=1))


def show(report, title):
    print(f"\n{title}")
    print(f"  d_rho    = {report.d_rho:.6e}")
    print(f"  controls = {{{', '.join(f'{k}: {v:.3e}' for k, v in report.controls.items())}}}")
    print(f"  interval = [{report.lower:.3e}, {report.upper:.3e}]")
    print(f"  violated = {report.violated}   margin = {report.margin:.6e}")


ideal = run_protocol(ProtocolConfig(model=model, noise=None, pulses=pulses, detect_time=1.75))
show(ideal, "Ideal dimer, strict phase-matched detection: controls vanish, any")
print("  non-zero third-order signal witnesses coherence in the exciton basis.")

noisy = run_protocol(
    ProtocolConfig(
        model=model, noise=DephasingModel.uniform(4, 0.4), pulses=pulses, detect_time=1.75
    )
)
show(noisy, "Same protocol with uniform dephasing (Gamma = 0.4): the signal and")
print(f"  the margin shrink ({noisy.d_rho / ideal.d_rho:.3f} of the ideal value).")

per_branch = run_protocol(
    ProtocolConfig(
        model=model, noise=None, pulses=pulses, detect_time=1.75, detection="per_branch"
    )
)
show(per_branch, "Per-branch readout: reduced branches keep their own restricted")
print("  patterns, so each control is -|P1_j|^2 <= 0; the violation persists.")

# classical-input soundness: bypass the first pulse so a mixture enters
# the operation stage unchanged, then compare against the control interval
mixture = ClassicalMixture(np.array([0.5, 0.2, 0.2, 0.1]))
bounded = run_protocol(
    ProtocolConfig(
        model=model, noise=None, pulses=pulses, detect_time=1.75,
        input_state=mixture, bypass_first=True, detection="per_branch",
    )
)
show(bounded, "Classical mixture entering the operation stage directly: d_rho")
print("  stays inside the control interval (no false positive).")

gibbs = run_protocol(
    ProtocolConfig(
        model=model, noise=None, pulses=pulses, detect_time=1.75,
        detection="per_branch", control_strategy=(0.0, 0.05, 0.12, 0.25, 0.5),
    )
)
show(gibbs, "Controls recovered from five Gibbs-state observations instead of")
print("  eigenstate preparations; the report records the solve quality:")
print(f"  residual = {gibbs.notes['control_solve_residual']:.2e}, "
      f"condition number = {gibbs.notes['control_solve_cond']:.2e}")
