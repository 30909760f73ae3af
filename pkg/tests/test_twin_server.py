"""Twin server over the framed bridge: sessions, motion, env, lockstep."""

import threading
import time

import pytest

from npptwin.render.image import decode_ppm
from npptwin.twin.bridge import BridgeConnection


def ok(conn, body, timeout=None):
    status, rest = conn.request(body, timeout=timeout)
    assert status == "ok", (body, rest[:120])
    return rest


class TestQueries:
    def test_sim_time_advances_in_rt(self, rt_stack):
        with rt_stack.connect() as conn:
            t0 = int(ok(conn, "vget /sim/time"))
            time.sleep(0.15)
            t1 = int(ok(conn, "vget /sim/time"))
            assert t1 > t0

    def test_target_location(self, rt_stack):
        with rt_stack.connect() as conn:
            x, y, z = ok(conn, "vget /target/location").split(b" ")
            assert float(x) == rt_stack.twin.wm.target.x
            assert float(z) == 0.0

    def test_unknown_robot_404(self, rt_stack):
        with rt_stack.connect() as conn:
            status, rest = conn.request("vget /robot/nosuch/location")
            assert status == "error"
            assert rest.startswith(b"404")

    def test_plant_get_includes_staleness(self, rt_stack):
        with rt_stack.connect() as conn:
            deadline = time.monotonic() + 3.0
            while time.monotonic() < deadline:
                status, rest = conn.request("vget /plant/t_avg_c")
                if status == "ok":
                    value, stale = rest.split(b" ")
                    assert float(value) > 100.0
                    assert int(stale) >= 0
                    return
                time.sleep(0.05)
            pytest.fail("plant cache never primed")


class TestMotion:
    def test_move_requires_possession(self, rt_stack):
        with rt_stack.connect() as conn:
            status, rest = conn.request("vset /robot/r1/move forward")
            assert status == "error"
            assert rest.startswith(b"403")

    def test_move_after_possess(self, rt_stack):
        with rt_stack.connect() as conn:
            ok(conn, "vset /session/possess r1")
            x0, y0, _, _ = (float(v) for v in ok(conn, "vset /robot/r1/move forward").split(b" "))
            x1, y1, z1 = (float(v) for v in ok(conn, "vget /robot/r1/location").split(b" "))
            assert (x1, y1) == (x0, y0)

    def test_possession_conflict_409(self, rt_stack):
        a = rt_stack.connect()
        b = rt_stack.connect()
        try:
            ok(a, "vset /session/possess r1")
            status, rest = b.request("vset /session/possess r1")
            assert status == "error"
            assert rest.startswith(b"409")
        finally:
            a.close()
            b.close()

    def test_possession_released_on_disconnect(self, rt_stack):
        a = rt_stack.connect()
        ok(a, "vset /session/possess r1")
        a.close()
        deadline = time.monotonic() + 2.0
        while time.monotonic() < deadline:
            if rt_stack.twin.possessions.owner("r1") is None:
                break
            time.sleep(0.02)
        with rt_stack.connect() as b:
            ok(b, "vset /session/possess r1")

    def test_two_sessions_move_independent_robots(self, rt_stack):
        results = {}

        def drive(robot_id, key):
            with rt_stack.connect() as conn:
                ok(conn, f"vset /session/possess {robot_id}")
                for _ in range(5):
                    ok(conn, f"vset /robot/{robot_id}/move forward")
                results[key] = ok(conn, f"vget /robot/{robot_id}/location")

        t1 = threading.Thread(target=drive, args=("r1", "a"))
        t2 = threading.Thread(target=drive, args=("d1", "b"))
        t1.start(); t2.start(); t1.join(); t2.join()
        assert results["a"] != results["b"]

    def test_illegal_action_for_kind(self, rt_stack):
        with rt_stack.connect() as conn:
            ok(conn, "vset /session/possess r1")
            status, rest = conn.request("vset /robot/r1/altitude up")
            assert status == "error"
            assert rest.startswith(b"400")

    def test_rotation_responds_with_pose(self, rt_stack):
        with rt_stack.connect() as conn:
            ok(conn, "vset /session/possess r1")
            parts = ok(conn, "vset /robot/r1/rotate left").split(b" ")
            assert len(parts) == 4
            yaw = float(ok(conn, "vget /robot/r1/rotation"))
            assert yaw == 15.0


class TestCameraAndTopdown:
    def test_camera_dimensions(self, rt_stack):
        with rt_stack.connect() as conn:
            img = decode_ppm(ok(conn, "vget /camera/r1/lit 64 36"))
            assert (img.width, img.height) == (64, 36)

    def test_topdown_payload_is_ppm(self, rt_stack):
        with rt_stack.connect() as conn:
            body = ok(conn, "vget /topdown lit")
            assert body.startswith(b"P6\n")

    def test_thermal_and_lit_same_dims(self, rt_stack):
        with rt_stack.connect() as conn:
            lit = decode_ppm(ok(conn, "vget /topdown lit"))
            thermal = decode_ppm(ok(conn, "vget /topdown thermal"))
            assert (lit.width, lit.height) == (thermal.width, thermal.height)


class TestTrace:
    def test_trace_csv_download(self, rt_stack):
        with rt_stack.connect() as conn:
            ok(conn, "vset /robot/r1/trace on")
            time.sleep(0.3)
            ok(conn, "vset /robot/r1/trace off")
            body = ok(conn, "vget /robot/r1/trace")
            lines = body.decode().strip().split("\n")
            assert lines[0] == "t_ms,robot_id,x_m,y_m,z_m,yaw_deg"
            assert len(lines) > 2
            t_values = [int(l.split(",")[0]) for l in lines[1:]]
            assert t_values == sorted(t_values)
            assert len(set(t_values)) == len(t_values)


class TestSwarm:
    def test_spawn_twenty(self, rt_stack):
        with rt_stack.connect() as conn:
            ids = ok(conn, "vrun /swarm/spawn 20 turbine_hall").decode().split(" ")
            assert len(ids) == 20
            for rid in ids:
                ok(conn, f"vget /robot/{rid}/location")

    def test_capacity_error(self, rt_stack):
        with rt_stack.connect() as conn:
            status, rest = conn.request("vrun /swarm/spawn 100000 turbine_hall")
            assert status == "error"
            assert b"capacity" in rest


class TestLockstep:
    def test_time_frozen_without_commands(self, lockstep_stack):
        with lockstep_stack.connect() as conn:
            t0 = int(ok(conn, "vget /sim/time"))
            time.sleep(0.3)
            assert int(ok(conn, "vget /sim/time")) == t0

    def test_advance_moves_clock(self, lockstep_stack):
        with lockstep_stack.connect() as conn:
            t0 = int(ok(conn, "vget /sim/time"))
            t1 = int(ok(conn, "vrun /sim/advance 500"))
            assert t1 == t0 + 500
            assert int(ok(conn, "vget /sim/time")) == t1

    def test_advance_rejected_in_rt(self, rt_stack):
        with rt_stack.connect() as conn:
            status, rest = conn.request("vrun /sim/advance 100")
            assert status == "error"
            assert rest.startswith(b"409")

    def test_env_step_advances_exactly_one_tick(self, lockstep_stack):
        with lockstep_stack.connect() as conn:
            ok(conn, "vset /env/reset")
            t0 = int(ok(conn, "vget /sim/time"))
            ok(conn, "vrun /env/step 2")
            assert int(ok(conn, "vget /sim/time")) == t0 + lockstep_stack.config.tick_ms

    def test_reset_is_deterministic_without_ticks(self, lockstep_stack):
        with lockstep_stack.connect() as conn:
            a = ok(conn, "vset /env/reset")
            b = ok(conn, "vset /env/reset")
            assert a == b

    def test_plant_mirror_lockstep_advances_with_twin(self, lockstep_stack):
        with lockstep_stack.connect() as conn:
            ok(conn, "vrun /sim/advance 200")
            value, _ = ok(conn, "vget /plant/sim_time_ms").split(b" ")
            assert float(value) >= 200.0

    def test_end_to_end_mirroring_rod_write_halves_generation(self, lockstep_stack):
        # A setpoint write flows twin -> plant, the ODE responds, and the
        # result flows back: rod 0.5 sends generator output trending to
        # ~500 MW_e (the closed-form steady state). Within 120 s of sim
        # time the output has crossed halfway; the slow secondary-pressure
        # mode (tau ~130 s) finishes the settling by 600 s.
        def gen_power(conn):
            return float(ok(conn, "vget /plant/gen_power_mwe").split(b" ")[0])

        with lockstep_stack.connect() as conn:
            gen0 = gen_power(conn)
            assert gen0 == pytest.approx(1000.0, rel=0.01)
            assert ok(conn, "vset /plant/rod_position 0.5") == b"0.5"
            for _ in range(2):  # 120 s in chunks under the client timeout
                ok(conn, "vrun /sim/advance 60000")
            gen120 = gen_power(conn)
            assert gen120 < 750.0  # past halfway toward 500 and falling
            power, _ = ok(conn, "vget /plant/core_power_mw").split(b" ")
            assert abs(float(power) - 1500.0) / 1500.0 < 0.01
            for _ in range(8):  # on to 600 s total
                ok(conn, "vrun /sim/advance 60000")
            assert gen_power(conn) == pytest.approx(500.0, rel=0.02)


class TestEnvOverBridge:
    def test_step_before_reset_409(self, rt_stack):
        with rt_stack.connect() as conn:
            status, rest = conn.request("vrun /env/step 0")
            assert status == "error"
            assert rest.startswith(b"409")

    def test_aerial_action_on_ground_robot_is_400_and_server_survives(self, rt_stack):
        with rt_stack.connect() as conn:
            ok(conn, "vset /env/reset")
            status, rest = conn.request("vrun /env/step 4")  # up, wheeled robot
            assert status == "error"
            assert rest.startswith(b"400")
            # The tick loop is still alive and stepping.
            body = ok(conn, "vrun /env/step 2")
            assert b"P6\n" in body

    def test_step_response_shape(self, rt_stack):
        with rt_stack.connect() as conn:
            ok(conn, "vset /env/reset")
            body = ok(conn, "vrun /env/step 2")
            head, ppm = body.split(b"P6\n", 1)
            reward_s, done_s, dist_s = head.decode().strip().split(" ")
            assert done_s in ("0", "1")
            float(reward_s)
            float(dist_s)
            img = decode_ppm(b"P6\n" + ppm)
            assert (img.width, img.height) == (256, 144)

    def test_reset_returns_observation(self, rt_stack):
        with rt_stack.connect() as conn:
            img = decode_ppm(ok(conn, "vset /env/reset"))
            assert (img.width, img.height) == (256, 144)


class TestPlantWrites:
    def test_write_read_only_403(self, rt_stack):
        with rt_stack.connect() as conn:
            status, rest = conn.request("vset /plant/core_power_mw 5")
            assert status == "error"
            assert rest.startswith(b"403")

    def test_write_unknown_404(self, rt_stack):
        with rt_stack.connect() as conn:
            status, rest = conn.request("vset /plant/bogus 5")
            assert status == "error"
            assert rest.startswith(b"404")

    def test_write_round_trips_to_plant(self, rt_stack):
        with rt_stack.connect() as conn:
            assert ok(conn, "vset /plant/rod_position 0.5") == b"0.5"
            deadline = time.monotonic() + 3.0
            while time.monotonic() < deadline:
                status, rest = conn.request("vget /plant/rod_position")
                if status == "ok" and rest.split(b" ")[0] == b"0.5":
                    return
                time.sleep(0.05)
            pytest.fail("write never became observable")


class TestRecorder:
    def test_topdown_files_written(self, tmp_path):
        from tests.conftest import InProcessStack

        stack = InProcessStack(
            mode="lockstep", tick_ms=50, record_dir=str(tmp_path), topdown_interval_ms=1000
        )
        try:
            with stack.connect() as conn:
                ok(conn, "vrun /sim/advance 5000")
            files = sorted(p.name for p in tmp_path.glob("topdown_*.ppm"))
            assert len(files) == 5
            assert files[0] == "topdown_00000_1000.ppm"
            assert files == sorted(files)
            seqs = [int(f.split("_")[1]) for f in files]
            assert seqs == list(range(5))
        finally:
            stack.close()
