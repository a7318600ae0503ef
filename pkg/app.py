"""
T Centre Spin Toolkit - Main Entry Point
Run `python app.py --help` for the command list
"""
import logging
import sys

from tcentre.cli import main
from tcentre.config import config

# Configure logging (commands reconfigure from --log-level)
logging.basicConfig(
    level=getattr(logging, str(config.get_app_setting("LOG_LEVEL", "WARNING")).upper(), logging.WARNING),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


if __name__ == "__main__":
    sys.exit(main())
