#!/usr/bin/env python3
"""
Ancilla CZ Setup Verification Script

Checks that the simulator's dependencies are installed, the environment
settings are sane and the numerical core reproduces known reference values.
"""

import math
import sys
from pathlib import Path
from typing import Dict, List, Tuple

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

try:
    from ancilla_cz.config import Config
    from ancilla_cz.stepmodel import characterize_step, xbasis_config
except ImportError as e:
    print(f"X Failed to import ancilla_cz modules: {e}")
    print("   Make sure you're running this script from the project root directory")
    print("   and that dependencies are installed: uv pip install -r config/requirements.txt")
    sys.exit(1)


class Colors:
    """ANSI color codes for terminal output"""
    GREEN = '\033[92m'
    YELLOW = '\033[93m'
    RED = '\033[91m'
    BLUE = '\033[94m'
    BOLD = '\033[1m'
    END = '\033[0m'


def success(message: str) -> None:
    print(f"{Colors.GREEN}✓{Colors.END} {message}")


def warning(message: str) -> None:
    print(f"{Colors.YELLOW}!{Colors.END} {message}")


def error(message: str) -> None:
    print(f"{Colors.RED}X{Colors.END} {message}")


def info(message: str) -> None:
    print(f"{Colors.BLUE}i{Colors.END} {message}")


def header(message: str) -> None:
    print(f"\n{Colors.BOLD}{message}{Colors.END}")
    print("=" * len(message))


def check_python_version() -> Tuple[bool, str]:
    """Check Python version compatibility"""
    version = sys.version_info
    label = f"Python {version.major}.{version.minor}.{version.micro}"
    if (version.major, version.minor) < (3, 10):
        return False, f"{label} (requires 3.10+)"
    return True, label


def check_dependencies() -> Tuple[bool, List[str]]:
    """Import every package listed in config/requirements.txt"""
    requirements_file = project_root / "config/requirements.txt"
    if not requirements_file.exists():
        return False, ["requirements.txt not found"]

    import_names = {"python-decouple": "decouple"}
    missing = []
    for line in requirements_file.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        package = line.split('>=')[0].split('==')[0].split('<=')[0].strip()
        try:
            __import__(import_names.get(package, package.replace('-', '_')))
        except ImportError:
            missing.append(package)
    return not missing, missing


def check_settings() -> Tuple[bool, str]:
    """Validate numeric settings read from the environment or .env"""
    problems = Config.validate()
    if problems:
        return False, "; ".join(problems)
    return True, f"Settings valid (seed {Config.DEFAULT_SEED}, {Config.SCAN_POINTS} scan points)"


def check_reference_values() -> Tuple[bool, str]:
    """The X-basis pass at pi/16 must give phi0 = -0.158182 and p1 = 0.0732233"""
    try:
        outcome = characterize_step(math.pi / 16, xbasis_config())
    except Exception as e:
        return False, f"Characterization failed: {e}"
    if not outcome.valid:
        return False, "X-basis pass reported as invalid"
    if abs(outcome.phi_port0 + 0.158182) > 1e-6 or abs(outcome.p_port1 - 0.0732233) > 1e-7:
        return False, f"Unexpected values phi0={outcome.phi_port0:.6f} p1={outcome.p_port1:.7f}"
    return True, f"phi0={outcome.phi_port0:.6f}, p1={outcome.p_port1:.7f}"


def check_mcp_server() -> Tuple[bool, str]:
    """Import the MCP tool layer"""
    try:
        from ancilla_cz import tools  # noqa: F401
        return True, "MCP tool module imports successfully"
    except Exception as e:
        return False, f"MCP tool import failed: {e}"


def run_diagnostics() -> Dict[str, Tuple[bool, str]]:
    """Run all diagnostic checks"""
    diagnostics: Dict[str, Tuple[bool, str]] = {}

    header("Environment Checks")
    diagnostics["python_version"] = check_python_version()
    (success if diagnostics["python_version"][0] else error)(diagnostics["python_version"][1])

    header("Dependency Checks")
    deps_ok, missing = check_dependencies()
    diagnostics["dependencies"] = (deps_ok, ", ".join(missing))
    if deps_ok:
        success("All dependencies installed")
    else:
        error(f"Missing dependencies: {diagnostics['dependencies'][1]}")

    header("Configuration")
    diagnostics["settings"] = check_settings()
    (success if diagnostics["settings"][0] else error)(diagnostics["settings"][1])

    header("Numerical Core")
    diagnostics["reference_values"] = check_reference_values()
    (success if diagnostics["reference_values"][0] else error)(diagnostics["reference_values"][1])

    header("MCP Server")
    diagnostics["mcp_server"] = check_mcp_server()
    (success if diagnostics["mcp_server"][0] else warning)(diagnostics["mcp_server"][1])

    return diagnostics


def provide_suggestions(diagnostics: Dict[str, Tuple[bool, str]]) -> None:
    """Provide troubleshooting suggestions based on diagnostics"""
    header("Troubleshooting Suggestions")

    if not diagnostics["python_version"][0]:
        info("• Install Python 3.10 or higher from python.org")

    if not diagnostics["dependencies"][0]:
        info("• Install dependencies: uv pip install -r config/requirements.txt")

    if not diagnostics["settings"][0]:
        info("• Check the overrides in your .env file against TROUBLESHOOTING.md")

    if not diagnostics["reference_values"][0]:
        info("• Remove VALIDITY_TOL and SCAN_POINTS overrides and re-run")

    if not diagnostics["mcp_server"][0]:
        info("• The CLI works without fastmcp; install it only for the tool server")


def main():
    """Main verification function"""
    print(f"{Colors.BOLD}Ancilla CZ Setup Verification{Colors.END}")
    print("=" * 40)

    diagnostics = run_diagnostics()

    critical_checks = ["python_version", "dependencies", "settings", "reference_values"]
    all_critical_ok = all(diagnostics[check][0] for check in critical_checks)

    provide_suggestions(diagnostics)

    header("Summary")
    if all_critical_ok:
        success("All critical checks passed! Your setup should work correctly.")
        info("Next steps:")
        info("• ancilla-cz characterize --alpha pi/16")
        info("• ancilla-cz figures fig6-expectation --out results")
    else:
        error("Some critical checks failed. Please follow the suggestions above.")

    sys.exit(0 if all_critical_ok else 1)


if __name__ == "__main__":
    main()
