from app.models.simulation_run_table import SimulationRun, WindowTrace
