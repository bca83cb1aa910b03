"""日誌工具"""

import sys

from loguru import logger

LOG_FORMAT = "<green>{time:HH:mm:ss}</green> | <level>{level: <7}</level> | <cyan>{name}</cyan> - {message}"


def setup_logger(level: str = "INFO"):
    """設定 loguru 日誌輸出到 stderr

    stdout 保留給 JSON / CSV 輸出，因此只加 stderr sink。

    Args:
        level: 日誌等級
    """
    logger.remove()
    logger.add(sys.stderr, level=level.upper(), format=LOG_FORMAT)
    return logger
