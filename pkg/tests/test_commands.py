import pytest

from telavatar.proto.commands import Command, MalformedCommand


@pytest.mark.parametrize(
    "payload",
    [
        {"op": "park"},
        {"op": "stop-drive"},
        {"op": "turn-left", "deg": 15},
        {"op": "turn-right", "deg": 180},
        {"op": "drive-forward", "m": 0.5},
        {"op": "drive-left", "m": 1.0},
        {"op": "drive-right", "m": 5.0},
    ],
)
def test_valid_commands(payload):
    cmd = Command.from_payload(payload)
    assert cmd.op == payload["op"]
    assert cmd.to_payload() == {k: float(v) if k != "op" else v for k, v in payload.items()}


@pytest.mark.parametrize(
    "payload",
    [
        {"op": "fly"},
        {"op": "turn-left"},                      # missing deg
        {"op": "turn-left", "deg": 0},            # deg must be > 0
        {"op": "turn-left", "deg": 181},          # beyond safety bound
        {"op": "turn-left", "deg": 15, "m": 1.0}, # extraneous parameter
        {"op": "drive-forward"},                  # missing m
        {"op": "drive-forward", "m": 0},
        {"op": "drive-forward", "m": 5.5},
        {"op": "drive-forward", "deg": 10, "m": 1.0},
        {"op": "park", "m": 1.0},
        {"op": "park", "extra": True},
        {"op": "turn-left", "deg": "fast"},
        {"deg": 15},
        "park",
    ],
)
def test_malformed_commands(payload):
    with pytest.raises(MalformedCommand):
        Command.from_payload(payload)


def test_roundtrip():
    cmd = Command("turn-left", deg=15.0)
    assert Command.from_payload(cmd.to_payload()) == cmd
