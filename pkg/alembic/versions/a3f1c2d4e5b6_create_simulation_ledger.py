"""Create simulation_runs and window_traces tables

Revision ID: a3f1c2d4e5b6
Revises:
Create Date: 2026-10-18 10:12:41.208113

"""
from typing import Sequence, Union

from alembic import op
import sqlalchemy as sa


# revision identifiers, used by Alembic.
revision: str = 'a3f1c2d4e5b6'
down_revision: Union[str, Sequence[str], None] = None
branch_labels: Union[str, Sequence[str], None] = None
depends_on: Union[str, Sequence[str], None] = None


def upgrade() -> None:
    """Upgrade schema."""
    op.create_table('simulation_runs',
    sa.Column('id', sa.String(length=36), nullable=False),
    sa.Column('kind', sa.String(length=20), nullable=False),
    sa.Column('label', sa.String(length=255), nullable=True),
    sa.Column('seed', sa.Integer(), nullable=False),
    sa.Column('config', sa.Text(), nullable=False),
    sa.Column('total_distance_m', sa.Float(), nullable=False),
    sa.Column('total_idle_s', sa.Float(), nullable=False),
    sa.Column('tail_idle_s', sa.Float(), nullable=False),
    sa.Column('percent_assigned', sa.Float(), nullable=False),
    sa.Column('presented', sa.Integer(), nullable=False),
    sa.Column('assigned', sa.Integer(), nullable=False),
    sa.Column('results_path', sa.String(length=1024), nullable=True),
    sa.Column('elapsed_s', sa.Float(), nullable=True),
    sa.Column('created_at', sa.DateTime(), server_default=sa.text('(CURRENT_TIMESTAMP)'), nullable=False),
    sa.PrimaryKeyConstraint('id')
    )
    op.create_index('ix_simulation_runs_kind', 'simulation_runs', ['kind'], unique=False)
    op.create_index('ix_simulation_runs_created_at', 'simulation_runs', ['created_at'], unique=False)
    op.create_table('window_traces',
    sa.Column('id', sa.Integer(), autoincrement=True, nullable=False),
    sa.Column('run_id', sa.String(length=36), nullable=False),
    sa.Column('window', sa.Integer(), nullable=False),
    sa.Column('n_tasks', sa.Integer(), nullable=False),
    sa.Column('assigned', sa.Integer(), nullable=False),
    sa.Column('carried', sa.Integer(), nullable=False),
    sa.Column('chosen_k', sa.Integer(), nullable=True),
    sa.Column('fitness', sa.Float(), nullable=True),
    sa.Column('distance_m', sa.Float(), nullable=False),
    sa.Column('idle_s', sa.Float(), nullable=False),
    sa.ForeignKeyConstraint(['run_id'], ['simulation_runs.id'], ),
    sa.PrimaryKeyConstraint('id')
    )
    op.create_index(op.f('ix_window_traces_run_id'), 'window_traces', ['run_id'], unique=False)


def downgrade() -> None:
    """Downgrade schema."""
    op.drop_index(op.f('ix_window_traces_run_id'), table_name='window_traces')
    op.drop_table('window_traces')
    op.drop_index('ix_simulation_runs_created_at', table_name='simulation_runs')
    op.drop_index('ix_simulation_runs_kind', table_name='simulation_runs')
    op.drop_table('simulation_runs')
