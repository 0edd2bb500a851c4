import os

# Logging Configuration
LOG_LEVEL = os.environ.get("CCTL_LOG_LEVEL", "INFO")
LOG_FORMAT = os.environ.get("CCTL_LOG_FORMAT", "%(asctime)s - %(name)s - %(levelname)s - %(message)s")

# API Configuration
API_HOST = os.environ.get("CCTL_API_HOST", "127.0.0.1")
API_PORT = int(os.environ.get("CCTL_API_PORT", "5000"))
MAX_CONTENT_LENGTH = 4 * 1024 * 1024  # 4MB max request body

# Resource Caps
CONFIGURATION_CAP = int(os.environ.get("CCTL_CONFIGURATION_CAP", str(10 ** 7)))  # counting product
CLOSURE_CAP = int(os.environ.get("CCTL_CLOSURE_CAP", str(2 ** 18)))  # Hintikka atoms
CHAIN_CAP = int(os.environ.get("CCTL_CHAIN_CAP", "1000000"))  # pm reduction states
MEMO_CAP = int(os.environ.get("CCTL_MEMO_CAP", "5000000"))  # CCTLv memo entries
TRANSLATION_FUEL = int(os.environ.get("CCTL_TRANSLATION_FUEL", "1000000"))
ORACLE_CAP = int(os.environ.get("CCTL_ORACLE_CAP", "2000000"))  # enumerated prefixes

# Randomized runs and oracles
DEFAULT_SEED = int(os.environ.get("CCTL_SEED", "20240611"))
DEFAULT_WINDOW = int(os.environ.get("CCTL_WINDOW", "20"))  # windowed product clamp
DEFAULT_HORIZON = int(os.environ.get("CCTL_HORIZON", "12"))  # oracle prefix length

# Integer constants in formulas are 64-bit signed
INT_MIN = -(2 ** 63)
INT_MAX = 2 ** 63 - 1
