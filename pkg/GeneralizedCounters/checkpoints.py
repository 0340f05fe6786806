import torch
import logging
from datetime import datetime


def save_snapshot(agent, episode: int, snapshot_path: str, trial: int = None):
    '''
    saves the Q- and E-head weights of a LinearAgent, tagged with the episode index
    '''
    snapshot = {
        "episode": episode,
        "trial": trial,
        "agent": agent.spec.kind,
        "q_state_dict": agent.q_head.state_dict(),
        "e_state_dict": agent.e_head.state_dict(),
        "save_dttm": datetime.now().strftime("%Y-%m-%d %H:%M:%S"),
    }
    torch.save(snapshot, snapshot_path)

    logging.info(8*"-")
    logging.info(f"Saved heads to snapshot: {snapshot_path}")
    logging.info(f"Episode: {episode}")
    logging.info(8*"-")


def load_snapshot(agent, snapshot_path: str):
    '''
    loads head weights from given path into the agent

    Notes
    -----
    snapshot: dict
              parameters saved during training i.e.:
              - q_state_dict, e_state_dict
              - episode index
              - agent kind
              - save time
    '''
    snapshot = torch.load(snapshot_path)

    agent.q_head.load_state_dict(snapshot["q_state_dict"])
    agent.e_head.load_state_dict(snapshot["e_state_dict"])

    logging.info(f"Loaded heads from snapshot: {snapshot_path}")
    logging.info(f"Agent: {snapshot.get('agent')}")
    logging.info(f"Trial: {snapshot.get('trial')}")
    logging.info(f"Episode: {snapshot.get('episode')}")
    logging.info(f"Save dttm: {snapshot.get('save_dttm')}")
    logging.info(8*"-")

    return agent, snapshot
