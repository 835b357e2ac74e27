"""Edge-centric telepresence robot stack.

Subpackages:
    proto     -- wire format and sans-IO reliability engine for the edge<->avatar link
    transport -- real UDP endpoints and a deterministic impaired in-process channel
    nav       -- occupancy-grid planning, path smoothing, command discretization
    avatar    -- simulated robot: kinematics, command execution, speaker source
    edge      -- control server: mode/command/session resources, HTTP API, SSE stream
"""

__version__ = "0.1.0"
