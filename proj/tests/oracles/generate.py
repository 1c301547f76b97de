"""Independent high-precision reference values, frozen into oracle_values.hpp.

Run:  python3 tests/oracles/generate.py > tests/oracle_values.hpp
"""
import mpmath as mp

mp.mp.dps = 40


def osc(phase, amp, lo, hi, lam):
    # Split at many points so mpmath's tanh-sinh sees a few periods per piece.
    pieces = max(8, int(lam * 1.2))
    pts = [lo + (hi - lo) * mp.mpf(i) / pieces for i in range(pieces + 1)]
    return mp.quad(lambda x: amp(x) * mp.expj(lam * phase(x)), pts)


def fresnel01(lam):
    # \int_0^1 e^{i lam s^2} ds via the complex error function.
    lam = mp.mpf(lam)
    if lam == 0:
        return mp.mpc(1)
    c = mp.sqrt(-1j * lam)
    return mp.sqrt(mp.pi) / (2 * c) * mp.erf(c)


def trunc_gauss(N, z):
    # \int_0^1 e^{2iN(r-z)^2} dr = \int_{-z}^{1-z} e^{2iN u^2} du
    lam = 2 * mp.mpf(N)
    c = mp.sqrt(-1j * lam)
    return mp.sqrt(mp.pi) / (2 * c) * (mp.erf(c * (1 - z)) + mp.erf(c * z))


def Ijk(j, k, n, N, s):
    sk = mp.mpf(s) ** k
    return osc(lambda r: r ** j * sk + 2 * r * r - 2 * r, lambda r: r ** (n - 1), 0, 1, mp.mpf(N))


def emit(name, v):
    v = mp.mpc(v)
    print(f"inline constexpr std::complex<double> {name}{{{mp.nstr(v.real, 17)}, {mp.nstr(v.imag, 17)}}};")


print("#pragma once")
print("// Generated by tests/oracles/generate.py (mpmath, 40 digits). Do not edit.")
print("#include <complex>")
print("namespace oracle {")
emit("kFresnel01_lam100", fresnel01(100))
emit("kFresnel01_lam1e4", fresnel01(10000))
emit("kTruncGauss_N1e4_z0375", trunc_gauss(10000, mp.mpf(3) / 8))
emit("kTruncGauss_N64_z025", trunc_gauss(64, mp.mpf(1) / 4))
emit("kTruncGauss_N64_z05", trunc_gauss(64, mp.mpf(1) / 2))
emit("kTruncGauss_N4096_z05", trunc_gauss(4096, mp.mpf(1) / 2))
emit("kI_j1k1n1_N256_s0", Ijk(1, 1, 1, 256, 0))
emit("kI_j2k1n2_N256_s05", Ijk(2, 1, 2, 256, mp.mpf(1) / 2))
emit("kI_j1k2n3_N512_s075", Ijk(1, 2, 3, 512, mp.mpf(3) / 4))
emit("kI_j2k2n1_N100_s1", Ijk(2, 2, 1, 100, 1))
print("}  // namespace oracle")
