"""Where does the pami profile peak?

Generates one adaptive-FCM sequence per order k = 1..5 and prints the pami
value at every lag. The profile peaks at the generating order once T is
large enough, which is exactly what the two-step selector exploits.

Usage: python3 profile_peaks.py [T] [alpha]
"""

import sys

from fcmtune.dependence import profile, select_k
from fcmtune.fcm import HyperParams, generate


def main() -> None:
    t = int(sys.argv[1]) if len(sys.argv) > 1 else 100_000
    alpha = float(sys.argv[2]) if len(sys.argv) > 2 else 0.5
    h_max = 8

    header = "k    " + "".join(f"h={h:<7d}" for h in range(1, h_max + 1)) + "k*"
    print(f"pami profiles at T={t}, alpha={alpha}")
    print(header)
    print("-" * len(header))
    for k in range(1, 6):
        seq = generate(HyperParams(k, alpha), t, seed=k)
        prof = profile(seq, "pami", h_max)
        k_star = select_k(prof)
        cells = "".join(f"{v:<9.4f}" for v in prof.values)
        mark = "" if k_star == k else "   (missed)"
        print(f"{k}    {cells}{k_star}{mark}")


if __name__ == "__main__":
    main()
