"""
Gateway server lifecycle.
"""

import uvicorn

from api.app import create_app
from config.gateway import ConfigError, GatewayConfig
from services.artifacts import ArtifactError
from services.query_templates import CustomQueryError
from utils.logger import log_error, log_info


def serve(config: GatewayConfig, check_only: bool = False) -> int:
    """
    Start the gateway and block until it is stopped.

    uvicorn handles SIGINT/SIGTERM with a graceful shutdown.

    Args:
        config: Gateway configuration
        check_only: Validate artifacts and custom queries, then return without binding

    Returns:
        Process exit code: 0 on clean shutdown or successful check, 1 on
        startup failure (inconsistent artifacts, port already bound)
    """
    try:
        app = create_app(config)
    except (ArtifactError, ConfigError, CustomQueryError) as e:
        log_error(error_message=str(e), error_type=type(e).__name__)
        return 1

    if check_only:
        log_info(
            message="Artifacts are consistent",
            extra={"artifacts": config.artifacts, "routes": len(app.state.document.paths)}
        )
        return 0

    server = uvicorn.Server(
        uvicorn.Config(app, host=config.host, port=config.port, log_config=None, access_log=False)
    )
    log_info(message=f"Listening on {config.host}:{config.port}")
    try:
        server.run()
    except SystemExit as e:
        # uvicorn exits with status 1 when it cannot bind
        code = e.code if isinstance(e.code, int) else 1
        if code:
            log_error(error_message=f"Cannot listen on {config.host}:{config.port}", error_type="StartupError")
        return code
    except OSError as e:
        log_error(error_message=f"Cannot listen on {config.host}:{config.port}: {e}", error_type="StartupError")
        return 1

    return 0 if server.started else 1
