from tarpitnav.config import TARPITNAV_VERSION

__version__ = TARPITNAV_VERSION
