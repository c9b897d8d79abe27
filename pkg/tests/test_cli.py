"""Command-line behavior: run, export, serve."""

import socket
import threading
import time
from importlib import resources

import pytest

from fdsteer import cli
from fdsteer import protocol as P
from fdsteer import tree as tree_mod
from fdsteer.goals import parse_model
from fdsteer.session import Session


def model_path(name, tmp_path):
    text = (resources.files("fdsteer") / "models" / name).read_text()
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def run_cli(argv):
    return cli.main(argv)


def summary_value(out, key):
    for line in out.splitlines():
        if line.startswith(key + ":"):
            return line.split(":", 1)[1].strip()
    raise AssertionError("no %r line in %r" % (key, out))


# --- run ---

def test_run_sendmore_all_buttons(tmp_path, capsys):
    trace = tmp_path / "sendmore.trace"
    status = run_cli(["run", model_path("sendmore.model", tmp_path),
                      "--goals", "all-buttons", "--trace", str(trace)])
    out = capsys.readouterr().out
    assert status == 0
    assert summary_value(out, "solutions") == "1"
    assert summary_value(out, "undo-node before first success") == "0"
    assert "solution 1: S=9 E=5 N=6 D=7 M=1 O=0 R=8 Y=2" in out
    lines = trace.read_bytes().decode("utf-8").splitlines()
    msgs = [P.decode(line, from_engine=True) for line in lines]
    assert any(isinstance(m, P.Success) for m in msgs)


def test_run_trace_is_byte_deterministic(tmp_path, capsys):
    mp = model_path("sendmore.model", tmp_path)
    t1, t2 = tmp_path / "a.trace", tmp_path / "b.trace"
    assert run_cli(["run", mp, "--goals", "all-buttons",
                    "--trace", str(t1)]) == 0
    assert run_cli(["run", mp, "--goals", "all-buttons",
                    "--trace", str(t2)]) == 0
    capsys.readouterr()
    assert t1.read_bytes() == t2.read_bytes()


def test_run_queens_all_solutions(tmp_path, capsys):
    status = run_cli(["run", model_path("queens.model", tmp_path),
                      "--goals", "safe,trace_labeling", "--all-solutions"])
    out = capsys.readouterr().out
    assert status == 0
    assert summary_value(out, "solutions") == "92"


def test_run_queens_n_override(tmp_path, capsys):
    status = run_cli(["run", model_path("queens.model", tmp_path),
                      "--n", "4", "--goals", "safe,trace_labeling",
                      "--all-solutions"])
    out = capsys.readouterr().out
    assert status == 0
    assert summary_value(out, "solutions") == "2"


def test_run_missing_model_exits_2(tmp_path, capsys):
    status = run_cli(["run", str(tmp_path / "nope.model"),
                      "--goals", "all-buttons"])
    assert status == 2
    assert "cannot read model" in capsys.readouterr().err


def test_run_ambiguous_button_prefix(tmp_path, capsys):
    status = run_cli(["run", model_path("sendmore.model", tmp_path),
                      "--goals", "trace_labeling"])
    assert status == 1
    assert "matches 2 buttons" in capsys.readouterr().err


def test_run_failing_goal_exits_1(tmp_path, capsys):
    status = run_cli(["run", model_path("sendmore.model", tmp_path),
                      "--goals", "S #= 12"])
    assert status == 1
    assert "goal failed" in capsys.readouterr().err


def test_run_parse_error_exits_1(tmp_path, capsys):
    status = run_cli(["run", model_path("sendmore.model", tmp_path),
                      "--goals", "S #= #="])
    assert status == 1
    assert "parse error" in capsys.readouterr().err


def test_run_goal_list_splits_outside_brackets(tmp_path, capsys):
    status = run_cli(["run", model_path("sendmore.model", tmp_path),
                      "--goals",
                      "fd_domain([S,M],1,9), fd_all_different([S,E])"])
    out = capsys.readouterr().out
    assert status == 0
    assert summary_value(out, "solutions") == "1"


def test_run_snapshot_mode_flag(tmp_path, capsys):
    trace = tmp_path / "t.trace"
    status = run_cli(["run", model_path("sendmore.model", tmp_path),
                      "--goals", "E #= 5", "--snapshot", "interval",
                      "--trace", str(trace)])
    capsys.readouterr()
    assert status == 0
    lines = trace.read_bytes().decode("utf-8").splitlines()
    msgs = [P.decode(line, from_engine=True) for line in lines]
    assert any(isinstance(m, P.DomainIntervals) for m in msgs)


def test_run_model_flag_equals_positional(tmp_path, capsys):
    mp = model_path("sendmore.model", tmp_path)
    assert run_cli(["run", "--model", mp, "--goals", "E #= 5"]) == 0
    capsys.readouterr()
    with pytest.raises(SystemExit):
        run_cli(["run", mp, "--model", mp, "--goals", "E #= 5"])
    capsys.readouterr()


# --- export ---

@pytest.fixture
def queens_trace(tmp_path, capsys):
    trace = tmp_path / "queens.trace"
    assert run_cli(["run", model_path("queens.model", tmp_path),
                    "--goals", "safe,trace_labeling", "--all-solutions",
                    "--trace", str(trace)]) == 0
    capsys.readouterr()
    return trace


def test_export_svg_fixed_width(queens_trace, tmp_path, capsys):
    out = tmp_path / "t.svg"
    status = run_cli(["export", str(queens_trace),
                      "--layout", "fixed-width", "--format", "svg",
                      "--out", str(out)])
    capsys.readouterr()
    assert status == 0
    doc = out.read_text()
    assert doc.startswith("<svg")
    assert doc.count("class=\"cross\"") == 92


def test_export_scene_to_stdout(queens_trace, capsys):
    status = run_cli(["export", str(queens_trace),
                      "--layout", "alt3d", "--format", "scene"])
    out = capsys.readouterr().out
    assert status == 0
    assert out.startswith("tree-scene v1\n")


def test_export_treemap_svg(queens_trace, tmp_path, capsys):
    out = tmp_path / "t.svg"
    assert run_cli(["export", str(queens_trace), "--layout", "treemap",
                    "--format", "svg", "--out", str(out)]) == 0
    capsys.readouterr()
    assert "<rect" in out.read_text()


def test_export_unsupported_combo(queens_trace, capsys):
    status = run_cli(["export", str(queens_trace),
                      "--layout", "alt3d", "--format", "svg"])
    assert status == 1
    assert "3D" in capsys.readouterr().err


def test_export_corrupt_trace_names_frame(queens_trace, tmp_path, capsys):
    lines = queens_trace.read_bytes().decode("utf-8").splitlines()
    drop = next(i for i, ln in enumerate(lines) if ln.startswith("<node "))
    bad = tmp_path / "bad.trace"
    bad.write_text("\n".join(lines[:drop] + lines[drop + 1:]) + "\n")
    status = run_cli(["export", str(bad), "--layout", "fixed-width",
                      "--format", "svg", "--out", str(tmp_path / "x.svg")])
    err = capsys.readouterr().err
    assert status == 1
    assert "frame %d" % (drop + 1) in err


def test_export_truncated_line_names_frame(queens_trace, tmp_path, capsys):
    data = queens_trace.read_bytes()
    bad = tmp_path / "cut.trace"
    bad.write_bytes(data[:len(data) - 10])
    status = run_cli(["export", str(bad), "--layout", "fixed-width",
                      "--format", "svg", "--out", str(tmp_path / "x.svg")])
    err = capsys.readouterr().err
    assert status == 1
    assert "frame " in err


def test_export_missing_trace_exits_2(tmp_path, capsys):
    status = run_cli(["export", str(tmp_path / "none.trace")])
    assert status == 2
    capsys.readouterr()


def test_export_matches_live_tree(queens_trace, tmp_path, capsys):
    out = tmp_path / "replayed.svg"
    assert run_cli(["export", str(queens_trace), "--layout", "leaf-spacing",
                    "--format", "svg", "--out", str(out)]) == 0
    capsys.readouterr()

    text = (resources.files("fdsteer") / "models" / "queens.model")
    model = parse_model(text.read_text())
    live = tree_mod.SearchTree()
    session = Session(model, sink=live.apply)
    session.start()
    session.execute_text("%s, %s" % (model.buttons[0], model.buttons[-1]))
    while session.state == "AtSuccess":
        session.backtrack()
    assert tree_mod.export(live, "leaf-spacing", "svg") == out.read_text()


# --- serve ---

def free_port():
    probe = socket.socket()
    probe.bind(("127.0.0.1", 0))
    port = probe.getsockname()[1]
    probe.close()
    return port


def test_serve_bind_conflict_exits_3(tmp_path, capsys):
    from fdsteer import server as S
    srv = S.serve(S.session_factory(parse_model("model empty")), port=0)
    try:
        status = run_cli(["serve", model_path("sendmore.model", tmp_path),
                          "--port", str(srv.raw_port)])
        assert status == 3
        assert "cannot bind" in capsys.readouterr().err
    finally:
        srv.stop()


def test_serve_answers_on_chosen_port(tmp_path):
    mp = model_path("sendmore.model", tmp_path)
    for _ in range(10):
        port = free_port()
        t = threading.Thread(
            target=cli.main,
            args=(["serve", mp, "--port", str(port)],), daemon=True)
        t.start()
        deadline = time.monotonic() + 5.0
        while time.monotonic() < deadline:
            try:
                sock = socket.create_connection(("127.0.0.1", port),
                                                timeout=1.0)
                break
            except OSError:
                if not t.is_alive():
                    break
                time.sleep(0.05)
        else:
            continue
        if not t.is_alive():
            continue
        sock.settimeout(5.0)
        data = b""
        while b"<variables " not in data:
            chunk = sock.recv(4096)
            assert chunk
            data += chunk
        sock.close()
        return
    pytest.fail("could not start serve mode on any probed port")


def test_serve_port_env_default(monkeypatch):
    monkeypatch.setenv("FDSTEER_PORT", "5123")
    args = cli.build_parser().parse_args(["serve"])
    assert args.port == 5123


def test_serve_port_flag_wins(monkeypatch):
    monkeypatch.setenv("FDSTEER_PORT", "5123")
    args = cli.build_parser().parse_args(["serve", "--port", "6200"])
    assert args.port == 6200
