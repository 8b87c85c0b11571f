"""Sweep payload mass through the worst-case force budget.

Shows how the safety chain degrades as the load grows: tilt allowance
shrinks, the acceleration margin collapses, and eventually the gain
inequality fails or the chain refuses outright.
"""

from swarmlift import NoMargin, Overloaded, WorstCaseInputs, gain_inequality

C1, C2, MU_R = 0.17, 0.55, 0.2


def main():
    print(f"gains c1={C1} c2={C2} mu_r={MU_R}, thrust budget 6.4 N per vehicle\n")
    print("payload [kg]  tilt [rad]  accel [m/s^2]  axis [m/s^2]  lhs    verdict")
    for m_payload in (0.2, 0.3, 0.4, 0.5, 0.6, 0.65, 0.7, 0.9, 1.2):
        inputs = WorstCaseInputs(M_payload=m_payload, reference_horizontal_budget=None)
        try:
            b = gain_inequality(C1, C2, MU_R, inputs)
        except NoMargin as exc:
            print(f"{m_payload:12.2f}  {'':10s}  {'':13s}  {'':12s}  {'':5s}  no margin: {exc}")
            continue
        except Overloaded as exc:
            print(f"{m_payload:12.2f}  {'':10s}  {'':13s}  {'':12s}  {'':5s}  overloaded: {exc}")
            continue
        verdict = "gains ok" if b.gains_ok else "gain inequality FAILS"
        print(f"{m_payload:12.2f}  {b.tilt_max:10.4f}  {b.accel_max:13.4f}  "
              f"{b.accel_axis_max:12.4f}  {b.inequality_lhs:.3f}  {verdict}")

    b = gain_inequality(C1, C2, MU_R)
    print(f"\ndefault case, published planning numbers: "
          f"tilt {b.tilt_max:.2f} rad, budget {b.horizontal_budget:.2f} N "
          f"(exact {b.horizontal_budget_exact:.3f} N), axis limit "
          f"{b.accel_axis_max:.2f} m/s^2, lhs {b.inequality_lhs:.3f}")


if __name__ == "__main__":
    main()
