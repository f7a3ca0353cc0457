"""Training a linear encoder with the kernel fairness penalty.

Minimizes cross-entropy plus lambda times the squared group discrepancy of
the encoded representations.  Prints the optimization trace and compares
group-gap metrics of the learned head before (lambda = 0) and after the
penalty is switched on.
"""

import numpy as np

from fairmmd import (
    CellGaussian,
    PopulationSpec,
    TrainConfig,
    balanced_accuracy,
    dp,
    eok_hat_plugin,
    logistic_head_classifier,
    rbf,
    sample_population,
    train,
)

# Both cells shift by the same vector (0.8, 0) between groups, so projecting
# out z0 equalizes the group laws exactly — a fair direction exists.  But the
# outcome signal (0.8, 1.2) is tilted INTO the shift direction, so the
# unpenalized model happily uses z0 and picks up a parity gap.
spec = PopulationSpec(
    pi_s=0.5,
    p_y_given_s=np.array([[0.5, 0.5], [0.5, 0.5]]),
    cells={
        (0, 0): CellGaussian(np.array([0.0, 0.0]), 0.25 * np.eye(2)),
        (0, 1): CellGaussian(np.array([0.8, 1.2]), 0.25 * np.eye(2)),
        (1, 0): CellGaussian(np.array([0.8, 0.0]), 0.25 * np.eye(2)),
        (1, 1): CellGaussian(np.array([1.6, 1.2]), 0.25 * np.eye(2)),
    },
)
data = sample_population(spec, n=1000, seed=42)
k = rbf(1.0)


def encoded_report(tag, res):
    enc = type(data)(z=data.z @ res.encoder.T, s=data.s, y=data.y)
    head = logistic_head_classifier(res.head_w, res.head_b)
    print(f"{tag}: dp = {dp(head, enc):.4f}, "
          f"eok2 = {eok_hat_plugin(k, enc).eok2:.5f}, "
          f"balanced acc = {balanced_accuracy(head, enc, 'y'):.4f}")


base = train(data, TrainConfig(kernel=k, lam=0.0, steps=250, step_size=0.5,
                               encoder_dim=2, seed=0))
fair = train(data, TrainConfig(kernel=k, lam=10.0, steps=250, step_size=0.5,
                               encoder_dim=2, seed=0))

print("trace with the penalty on (every 50 steps):")
for t in range(0, len(fair.total_trace), 50):
    print(f"  step {t:4d}: ce = {fair.sup_trace[t]:.4f}  "
          f"penalty = {fair.penalty_trace[t]:.5f}  "
          f"total = {fair.total_trace[t]:.4f}")

encoded_report("lambda = 0 ", base)
encoded_report("lambda = 10", fair)
print("learned encoder (lambda = 10):")
print(np.round(fair.encoder, 3))
print("the penalty suppresses the group-shift direction z0 (small first "
      "column) while keeping the outcome direction z1 — most of the "
      "accuracy survives")
