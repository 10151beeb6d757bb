TOOL_NAME = "rpt"
TOOL_VERSION = "0.3.0"

DEFAULT_SEED = 0
# 0 resolves to every available core
DEFAULT_WORKERS = 0
DEFAULT_MAX_STEPS = 10**6
DEFAULT_RUNS = 10**4
BATCH_SIZE = 256
LAB_BLOCK_SIZE = 4096
RNG_BUFFER_SIZE = 1024

JOINT_SUPPORT_WARNING = 10**4
CONFIDENCE_LEVEL = 0.95

BERNOULLI_PREFIX = "_b"

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

# sqrt_tail smallness condition is checked with this relative slack
SMALLNESS_MARGIN = 1e-9
MAX_K_SEARCH = 2**62

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"
ENV_PREFIX = "RPT_"
