SEARCH_RADIUS = 10
SEARCH_RADIUS_ENV = "CYBUNDLE_SEARCH_RADIUS"
SEARCH_MAX_CANDIDATES = 50000
PIC0_SAMPLES = 20
SAMPLE_SEED = 0
SAMPLE_MAX_DENOMINATOR = 12
OUTPUT_FORMAT = "text"
OUTPUT_FORMATS = ["text", "json"]
LOG_LEVEL = "INFO"
CONFIG_PATH = "config.yml"
LOG_LEVELS = ["TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL"]
