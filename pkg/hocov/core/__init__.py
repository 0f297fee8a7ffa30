# Core configuration, logging and error modules
