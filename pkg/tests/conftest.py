import os

from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=200)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def pytest_make_parametrize_id(config, val, argname):
    if argname in ("w", "y") and isinstance(val, str) and len(val) > 12:
        return f"{argname}-len{len(val)}"
    return None
