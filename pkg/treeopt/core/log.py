import logging
from logging.handlers import RotatingFileHandler

from treeopt.core.config import Settings

LOG_FORMAT = "%(asctime)s %(levelname)s [%(name)s] %(message)s"

# Handlers added to the root logger by configure_logging
_installed: list[logging.Handler] = []


def installed_handlers() -> list[logging.Handler]:
    return list(_installed)


def reset_logging() -> None:
    """Remove and close every handler configure_logging installed."""
    root_logger = logging.getLogger()
    while _installed:
        handler = _installed.pop()
        root_logger.removeHandler(handler)
        handler.close()


def _install(handler: logging.Handler, level: int) -> None:
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logging.getLogger().addHandler(handler)
    _installed.append(handler)


def configure_logging(app_settings: Settings, level: str | None = None) -> int:
    """Install console (stderr) and optional rotating file handlers on the root logger.

    DEBUG=true forces DEBUG level, otherwise an explicit ``level`` wins over the
    LOG_LEVEL setting. Returns the numeric level that was applied.
    """
    if app_settings.debug:
        log_level_str = "DEBUG"
    else:
        log_level_str = (level or app_settings.log_level).upper()
    log_level = getattr(logging, log_level_str, logging.WARNING)

    # Re-running main() in one process (tests) must not stack handlers
    reset_logging()
    logging.getLogger().setLevel(log_level)

    # Console handler - always enabled, stdout is reserved for results
    _install(logging.StreamHandler(), log_level)

    if app_settings.log_to_file:
        app_settings.log_dir.mkdir(parents=True, exist_ok=True)
        log_file = app_settings.log_dir / "treeopt.log"
        _install(
            RotatingFileHandler(
                log_file,
                maxBytes=5 * 1024 * 1024,  # 5MB
                backupCount=3,
                encoding="utf-8",
            ),
            log_level,
        )
        logging.info(f"Logging to file: {log_file}")

    logging.getLogger(__name__).debug(
        f"{app_settings.app_name} logging configured - debug={app_settings.debug}, level={log_level_str}"
    )
    return log_level
