class InfeasibleScenarioError(Exception):
    """Cenário comprovadamente inviável antes de resolver o modelo"""

    def __init__(self, flow_id: str, family: str, message: str):
        self.flow_id = flow_id
        self.family = family
        super().__init__(f"{family}: fluxo {flow_id}: {message}")
