import numpy as np
import pytest

from ncsim.model_io import batch_reactor_path, certificate_from_gains, load_model
from ncsim.protocols import Protocol


@pytest.fixture(scope="session")
def benchmark():
    """Shipped batch-reactor model and its raw gain sections."""
    return load_model(batch_reactor_path())


@pytest.fixture(scope="session")
def reactor_model(benchmark):
    return benchmark[0]


@pytest.fixture(scope="session")
def reactor_gains(benchmark):
    return benchmark[1]


@pytest.fixture(scope="session")
def tod_cert(reactor_model, reactor_gains):
    return certificate_from_gains(reactor_model, reactor_gains, "mtod")


@pytest.fixture(scope="session")
def rr_cert(reactor_model, reactor_gains):
    return certificate_from_gains(reactor_model, reactor_gains, "mrr")


@pytest.fixture(scope="session")
def mtod_protocol(reactor_model):
    return Protocol("mtod", reactor_model.partition)


@pytest.fixture(scope="session")
def mrr_protocol(reactor_model):
    return Protocol("mrr", reactor_model.partition)
