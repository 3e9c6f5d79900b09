"""Smoke test for the miura extension module.

Build and install first:  maturin develop -m crates/python/Cargo.toml
Then run:                 python python/smoke_test.py
"""

import math
import sys

import miura


def check(cond, msg):
    if not cond:
        print(f"FAIL {msg}")
        sys.exit(1)
    print(f"ok   {msg}")


def algebra():
    alg = miura.Algebra(3)
    e1, e2 = (miura.Multivector.generator(alg, i) for i in (1, 2))
    one = miura.Multivector.scalar(alg, 1)
    check((e1 * e1 + one).norm() == 0.0, "e1^2 = -1")
    check((e1 * e2 + e2 * e1).norm() == 0.0, "e1 e2 = -e2 e1")
    v = miura.Multivector.vector(alg, [1.0, -2.0, 0.5])
    check((v * v.vector_inverse() - one).norm() < 1e-14, "vector inverse")
    ab = e1 * e2
    rev = ab.involution("reversion")
    check(rev == e2.involution("reversion") * e1.involution("reversion"), "reversion reverses products")

    w = miura.Algebra(2, witt=True)
    f, fp = miura.Multivector.witt_f(w), miura.Multivector.witt_f_plus(w)
    check(f * fp + fp * f == miura.Multivector.scalar(w, 1), "f f+ + f+ f = 1")
    check(len(w) == 16 and len(w.blades()) == 16, "Witt basis size")


def operators():
    g = miura.GridSpec.unit(2, 16)
    alg = miura.Algebra(2)
    quad = miura.CliffordField.scalar(g, alg, lambda x: 1 + x[0] * x[1] - 0.5 * x[1] ** 2)
    check(miura.factorization_residual("laplace", quad) < 1e-12, "DD = -Laplacian on a quadratic")
    k = complex(2.0, 0.5)
    check(miura.factorization_residual("helmholtz", quad, k=k) < 1e-12, "Helmholtz factorization")

    cache = miura.KernelCache(g)
    f = miura.CliffordField.vector(g, alg, lambda x: [x[0], 0.0])
    bp = miura.borel_pompeiu_residual(f, cache)
    check(0 < bp < 0.05, f"Borel-Pompeiu residual {bp:.2e}")
    check(miura.im_q_residual(f, cache) < bp, "im Q residual below Borel-Pompeiu")

    e = miura.cauchy_kernel([0.3, 0.4])
    check(len(e) == 2 and e[0] < 0, "Cauchy kernel")
    check(abs(miura.bessel_k0(1.0) - 0.42102443824070834) < 1e-12, "K0(1)")


def solver():
    g = miura.GridSpec.unit(2, 24)
    alg = miura.Algebra(2)
    cache = miura.KernelCache(g)
    c = 0.1
    v = miura.CliffordField.scalar(g, alg, lambda x: -c * c * (x[0] ** 2 + x[1] ** 2))
    exact = miura.CliffordField.vector(g, alg, lambda x: [c * x[1], c * x[0]])
    a, report = miura.miura_iterate(v, cache, {"p": 1.5, "tol": 1e-10}, trace=exact)
    check(report["converged"] and report["grade1_pure"], f"solver converged in {report['iterations']} steps")
    err = (a - exact).w1p_norm(1.5) / exact.w1p_norm(1.5)
    check(err < 0.05, f"recovers D ln(phi), W1p error {err:.2e}")

    zero = miura.CliffordField.zeros(g, alg)
    a0, r0 = miura.miura_iterate(zero, cache, {"p": 1.5, "tol": 1e-10})
    check(r0["iterations"] == 1 and a0.max_abs() == 0.0, "V = 0 gives a = 0 in one step")

    phi = miura.CliffordField.scalar(g, alg, lambda x: math.exp(c * x[0] * x[1]))
    check(miura.proposition_check(phi) < 1e-3, "log-derivative satisfies the Miura equation")
    s, res = miura.reconstruct_log_phi(miura.log_derivative(phi))
    check(res < 1e-2, f"log reconstruction residual {res:.2e}")


def gross_pitaevskii():
    g = miura.GridSpec.cube(2, -1.0, 1.0, 16)
    alg = miura.Algebra(2)
    phi = miura.CliffordField.scalar(g, alg, lambda x: math.exp(-0.5 * (x[0] ** 2 + x[1] ** 2)))
    cache = miura.KernelCache(g)
    gp = {"g": 0.0, "alpha": 0.2, "mu": 1.0, "trap": {"kind": "harmonic", "omega": 1.0}}
    out = miura.gp_miura_pipeline(phi, cache, gp, {"p": 1.5, "tol": 1e-10}, boundary="trace")
    rep = out["report"]
    check(rep["F_solve_residual"] <= 1e-10, "Helmholtz F-solve")
    check(rep["miura_report"]["converged"], "GP Miura solve converged")
    check(max(out["density"].scalar_values()) > 0.5, "density field returned")


def study():
    t = miura.convergence_study("laplace_quadratic", [8, 16])
    check(t["exact"] and t["rows"][1]["order"] == "exact", "exact study marker")
    check("borel_pompeiu" in miura.study_cases(), "study case list")


if __name__ == "__main__":
    print(f"miura {miura.__version__}")
    for step in (algebra, operators, solver, gross_pitaevskii, study):
        step()
    print("all smoke checks passed")
