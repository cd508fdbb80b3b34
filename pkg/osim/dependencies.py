# osim/dependencies.py
import logging
from typing import Dict, Optional

from osim.config import AppSettings, app_settings
from osim.core.scenarios import CATALOG, TheoremScenario

logger = logging.getLogger(__name__)

# --- Singleton instances ---
_catalog_instance: Optional[Dict[str, TheoremScenario]] = None


def get_app_settings() -> AppSettings:
    """Dependency to get the application settings instance."""
    return app_settings


def get_catalog() -> Dict[str, TheoremScenario]:
    """Dependency to get the scenario catalog."""
    global _catalog_instance
    if _catalog_instance is None:
        logger.info(f"Loading scenario catalog ({len(CATALOG)} scenarios).")
        _catalog_instance = CATALOG
    return _catalog_instance
