import logging
import sys

from lffusion.cli import dispatch
from lffusion.config import settings

logging.basicConfig(
    level=settings.log_level.upper(),
    format=settings.log_format
)
logger = logging.getLogger(__name__)


if __name__ == "__main__":
    logger.debug(f"Output directory defaults to {settings.output_dir}")
    sys.exit(dispatch(sys.argv[1:]))
