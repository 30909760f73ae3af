"""npptwin: a desk-scale digital twin of a pressurized-water plant.

Subpackages:
    plant   lumped-parameter PWR surrogate and the ``plantd`` process
    mirror  line-based TCP variable-mirroring protocol (server + polling client)
    world   grid plant layout, robots, traces
    render  software raycaster, top-down views, PPM encoding
    env     step/reset navigation episodes
    twin    the ``twind`` process: bridge protocol, tick loop, web gateway
    bench   the ``nppbench`` profiling harness
"""

__version__ = "0.1.0"
