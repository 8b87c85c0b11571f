"""Distance disagreements turned into motion: translate, spin, rescale.

The same shape-holding law does all three. The operator command is
converted into per-edge disagreement coefficients and the formation moves
without any leader or global frame.
"""

import numpy as np

from swarmlift import (
    DisagreementSet,
    MotionCommand,
    compose_motion,
    simulate_ideal,
    square_formation_spec,
    square_positions,
)


def run(label, cmd, duration=40.0):
    spec = square_formation_spec()
    p_star = square_positions()
    dis, new_d = compose_motion(cmd, spec, p_star, dt=0.0)
    trace = simulate_ideal(spec, p_star, np.zeros((4, 2)), duration, dt=0.01, dis=dis)

    tail = trace.t >= duration - 2.0
    v_mean = trace.velocities[tail].mean(axis=(0, 1))
    speed = float(np.linalg.norm(trace.velocities[tail].mean(axis=1), axis=1).mean())

    # spin rate from the angle swept by vehicle 0 about the centroid
    rel = trace.positions - trace.positions.mean(axis=1, keepdims=True)
    ang = np.unwrap(np.arctan2(rel[:, 0, 1], rel[:, 0, 0]))
    omega = float((ang[-1] - ang[int(len(ang) / 2)]) / (trace.t[-1] - trace.t[int(len(ang) / 2)]))

    err = float(np.abs(trace.errors[-1]).max())
    print(f"{label:12s} speed={speed:5.3f} m/s  spin={omega:+.3f} rad/s  "
          f"mean v=({v_mean[0]:+.3f},{v_mean[1]:+.3f})  final edge err={err:.4f} m")


def main():
    print("command      -> measured steady motion (ideal model)\n")
    run("hold", MotionCommand())
    run("translate x", MotionCommand(v_translation=(0.5, 0.0)))
    run("translate xy", MotionCommand(v_translation=(0.3, -0.4)))
    run("spin", MotionCommand(omega_spin=0.15))
    run("spin+move", MotionCommand(v_translation=(0.4, 0.0), omega_spin=0.15))

    # scaling changes the desired distances themselves, shown separately
    spec = square_formation_spec()
    cmd = MotionCommand(scale_rate=0.1)
    dis, new_d = compose_motion(cmd, spec, square_positions(), dt=1.0)
    print(f"\nscale_rate=0.1 for one tick of 1 s: side "
          f"{spec.desired_distances[0]:.2f} -> {new_d[0]:.2f} m "
          f"(diagonal {spec.desired_distances[1]:.3f} -> {new_d[1]:.3f} m)")
    assert isinstance(dis, DisagreementSet)


if __name__ == "__main__":
    main()
