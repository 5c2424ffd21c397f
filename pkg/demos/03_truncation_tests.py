"""
Testing for truncation
======================

T_A asks whether there is truncation at all (Exp(1) null); T_B asks whether
truncation is light enough to ignore (normal null). Small p-values point to
rough truncation.
"""
import numpy as np

from tailtrunc import ParetoModel, TruncatedModel, sample, test_ta, test_tb
from tailtrunc.hypothesis_tests import l_limit_rough

cases = {
    "untruncated Pa(1)": ParetoModel(1.0),
    "T at 99% quantile": TruncatedModel.at_level(ParetoModel(1.0), 0.99),
    "T at 90% quantile": TruncatedModel.at_level(ParetoModel(1.0), 0.90),
}
for label, model in cases.items():
    x = sample(model, 400, seed=11)
    print(label)
    for k in (25, 50, 100, 200):
        a, b = test_ta(x, k), test_tb(x, k)
        print(f"  k={k:3d}  TA p={a.p_value:.4f} {'reject' if a.reject else '':6}  "
              f"TB p={b.p_value:.4f} {'reject' if b.reject else ''}")

# under rough truncation the standardized statistic drifts to -inf at rate sqrt(k)
for kappa in (0.1, 1.0, 10.0, 100.0):
    L = l_limit_rough(kappa)
    print(f"kappa={kappa:6.1f}  limit of L = {L:.5f}  -> sqrt(12*200)*L = {np.sqrt(2400) * L:.2f}")
