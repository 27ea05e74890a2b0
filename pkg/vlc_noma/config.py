"""
Configuration management for the VLC NOMA simulator.
"""

import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


class Config:
    """Environment-driven settings for the simulator."""

    def __init__(self):
        """Initialize configuration from environment variables."""
        self.threads = int(os.getenv('VLC_NOMA_THREADS', '0'))
        self.output_dir = os.getenv('VLC_NOMA_OUTPUT_DIR', 'output')
        self.jml_limit = int(os.getenv('VLC_NOMA_JML_LIMIT', str(2 ** 24)))
        # samples x candidates held in one decoder distance matrix
        self.block_elements = int(os.getenv('VLC_NOMA_BLOCK', str(1 << 22)))
        self.environment = os.getenv('ENVIRONMENT', 'development')
        self.log_level = os.getenv('LOG_LEVEL', 'INFO')

    def get_worker_count(self) -> int:
        """
        Resolve the worker cap.

        Returns:
            VLC_NOMA_THREADS when positive, otherwise the CPU count.
        """
        threads = int(os.getenv('VLC_NOMA_THREADS', str(self.threads)))
        if threads > 0:
            return threads
        return os.cpu_count() or 1

    def is_production(self) -> bool:
        """Check if running in production environment."""
        return self.environment.lower() == 'production'

    def is_development(self) -> bool:
        """Check if running in development environment."""
        return self.environment.lower() == 'development'


# Global config instance
config = Config()
