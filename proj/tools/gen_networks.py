#!/usr/bin/env python3
"""Regenerates the benchmark BIF files under data/.

Structures (nodes, arcs, state counts) follow the standard public benchmark
networks (Child, HailFinder, Hepar II). Conditional probability tables are
synthetic, drawn from a fixed-seed generator, since only the graph structure
matters to the junction-tree construction and cost model.
"""

import random
from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "data"


def emit(name, variables, parents, seed):
    rng = random.Random(seed)
    order = list(variables.keys())
    lines = [f"network {name} {{", "}"]
    for v in order:
        states = ", ".join(variables[v])
        lines.append(f"variable {v} {{")
        lines.append(f"  type discrete [ {len(variables[v])} ] {{ {states} }};")
        lines.append("}")

    def row(k):
        raw = [0.05 + rng.random() for _ in range(k)]
        total = sum(raw)
        vals = [x / total for x in raw]
        rounded = [round(x, 8) for x in vals[:-1]]
        last = round(1.0 - sum(rounded), 8)
        return rounded + [last]

    def fmt(vals):
        return ", ".join(f"{x:.8f}" for x in vals)

    for v in order:
        ps = parents.get(v, [])
        k = len(variables[v])
        if not ps:
            lines.append(f"probability ( {v} ) {{")
            lines.append(f"  table {fmt(row(k))};")
            lines.append("}")
        else:
            lines.append(f"probability ( {v} | {', '.join(ps)} ) {{")
            combos = [[]]
            for p in ps:
                combos = [c + [s] for c in combos for s in variables[p]]
            for combo in combos:
                lines.append(f"  ({', '.join(combo)}) {fmt(row(k))};")
            lines.append("}")
    out = DATA / f"{name}.bif"
    out.write_text("\n".join(lines) + "\n")
    n_edges = sum(len(p) for p in parents.values())
    params = 0
    for v in order:
        rows = 1
        for p in parents.get(v, []):
            rows *= len(variables[p])
        params += rows * (len(variables[v]) - 1)
    print(f"{name}: {len(order)} nodes, {n_edges} edges, {params} parameters, "
          f"max in-degree {max((len(p) for p in parents.values()), default=0)}")


def child():
    s = lambda *names: list(names)
    variables = {
        "BirthAsphyxia": s("yes", "no"),
        "Disease": s("PFC", "TGA", "Fallot", "PAIVS", "TAPVD", "Lung"),
        "Age": s("0-3_days", "4-10_days", "11-30_days"),
        "LVH": s("yes", "no"),
        "DuctFlow": s("Lt_to_Rt", "None", "Rt_to_Lt"),
        "CardiacMixing": s("None", "Mild", "Complete", "Transp."),
        "LungParench": s("Normal", "Congested", "Abnormal"),
        "LungFlow": s("Normal", "Low", "High"),
        "Sick": s("yes", "no"),
        "HypDistrib": s("Equal", "Unequal"),
        "HypoxiaInO2": s("Mild", "Moderate", "Severe"),
        "CO2": s("Normal", "Low", "High"),
        "ChestXray": s("Normal", "Oligaemic", "Plethoric", "Grd_Glass", "Asy/Patchy"),
        "Grunting": s("yes", "no"),
        "LVHreport": s("yes", "no"),
        "LowerBodyO2": s("<5", "5-12", "12+"),
        "RUQO2": s("<5", "5-12", "12+"),
        "CO2Report": s("<7.5", ">=7.5"),
        "XrayReport": s("Normal", "Oligaemic", "Plethoric", "Grd_Glass", "Asy/Patchy"),
        "GruntingReport": s("yes", "no"),
    }
    parents = {
        "Disease": ["BirthAsphyxia"],
        "Age": ["Disease", "Sick"],
        "LVH": ["Disease"],
        "DuctFlow": ["Disease"],
        "CardiacMixing": ["Disease"],
        "LungParench": ["Disease"],
        "LungFlow": ["Disease"],
        "Sick": ["Disease"],
        "HypDistrib": ["DuctFlow", "CardiacMixing"],
        "HypoxiaInO2": ["CardiacMixing", "LungParench"],
        "CO2": ["LungParench"],
        "ChestXray": ["LungParench", "LungFlow"],
        "Grunting": ["LungParench", "Sick"],
        "LVHreport": ["LVH"],
        "LowerBodyO2": ["HypDistrib", "HypoxiaInO2"],
        "RUQO2": ["HypoxiaInO2"],
        "CO2Report": ["CO2"],
        "XrayReport": ["ChestXray"],
        "GruntingReport": ["Grunting"],
    }
    emit("child", variables, parents, seed=20240601)


def hailfinder():
    s = lambda *names: list(names)
    updown = s("StrongUp", "WeakUp", "Neutral", "Down")
    moist = s("VeryWet", "Wet", "Neutral", "Dry")
    cloud = s("Cloudy", "PC", "Clear")
    nws = s("None", "Weak", "Strong")
    fcst = s("XNIL", "SIG", "SVR")
    scenarios = s("A", "B", "C", "D", "E", "F", "G", "H", "I", "J", "K")
    variables = {
        "N07muVerMo": updown,
        "SubjVertMo": updown,
        "QGVertMotion": updown,
        "CombVerMo": updown,
        "AreaMeso_ALS": updown,
        "SatContMoist": moist,
        "RaoContMoist": moist,
        "CombMoisture": moist,
        "AreaMoDryAir": moist,
        "VISCloudCov": cloud,
        "IRCloudCover": cloud,
        "CombClouds": cloud,
        "CldShadeOth": cloud,
        "AMInstabMt": nws,
        "InsInMt": nws,
        "WndHodograph": s("DCVZFavor", "StrongWest", "Westerly", "Other"),
        "OutflowFrMt": nws,
        "MorningBound": nws,
        "Boundaries": nws,
        "CldShadeConv": s("None", "Some", "Marked"),
        "CompPlFcst": s("IncCapDecIns", "LittleChange", "DecCapIncIns"),
        "CapChange": s("Decreasing", "LittleChange", "Increasing"),
        "LoLevMoistAd": s("StrongPos", "WeakPos", "Neutral", "Negative"),
        "InsChange": s("Decreasing", "LittleChange", "Increasing"),
        "MountainFcst": fcst,
        "Date": s("May15_Jun14", "Jun15_Jul1", "Jul2_Jul15", "Jul16_Aug10",
                  "Aug11_Aug20", "Aug20_Sep15"),
        "Scenario": scenarios,
        "ScenRelAMCIN": s("AB", "CThruK"),
        "MorningCIN": s("None", "PartInhibit", "Stifling", "TotalInhibit"),
        "AMCINInScen": s("LessThanAve", "Average", "MoreThanAve"),
        "CapInScen": s("LessThanAve", "Average", "MoreThanAve"),
        "ScenRelAMIns": s("ABI", "CDEJ", "F", "G", "H", "K"),
        "LIfr12ZDENSd": s("LIGt0", "N1GtLIGt_4", "N5GtLIGt_8", "LILt_8"),
        "AMDewptCalPl": s("Instability", "Neutral", "Stability"),
        "AMInsWliScen": s("LessUnstable", "Average", "MoreUnstable"),
        "InsSclInScen": s("LessUnstable", "Average", "MoreUnstable"),
        "ScenRel3_4": s("ACEFK", "B", "D", "GJ", "HI"),
        "LatestCIN": s("None", "PartInhibit", "Stifling", "TotalInhibit"),
        "LLIW": s("Unfavorable", "Weak", "Moderate", "Strong"),
        "CurPropConv": s("None", "Slight", "Moderate", "Strong"),
        "ScnRelPlFcst": scenarios,
        "PlainsFcst": fcst,
        "N34StarFcst": fcst,
        "R5Fcst": fcst,
        "Dewpoints": s("LowEvrywhere", "LowAtStation", "LowSHighN", "LowNHighS",
                       "LowMtsHighPl", "HighEvrywher", "Other"),
        "LowLLapse": s("CloseToDryAd", "Steep", "ModerateOrLe", "Stable"),
        "MeanRH": s("VeryMoist", "Average", "Dry"),
        "MidLLapse": s("CloseToDryAd", "Steep", "ModerateOrLe"),
        "MvmtFeatures": s("StrongFront", "MarkedUpper", "OtherRapid", "NoMajor"),
        "RHRatio": s("MoistMDryL", "DryMMoistL", "Other"),
        "SfcWndShfDis": s("DenvCyclone", "E_W_N", "E_W_S", "MovingFtorOt",
                          "DryLine", "None", "Other"),
        "SynForcng": s("SigNegative", "NegToPos", "SigPositive", "PosToNeg", "LittleChange"),
        "TempDis": s("QStationary", "Moving", "None", "Other"),
        "WindAloft": s("LV", "SWQuad", "NWQuad", "AllElse"),
        "WindFieldMt": s("Westerly", "LVorOther"),
        "WindFieldPln": s("LV", "DenvCycln", "LongAnticyc", "E_NE", "SEquad", "WidespdDnsl"),
    }
    parents = {
        "CombVerMo": ["N07muVerMo", "SubjVertMo", "QGVertMotion"],
        "AreaMeso_ALS": ["CombVerMo"],
        "CombMoisture": ["SatContMoist", "RaoContMoist"],
        "AreaMoDryAir": ["AreaMeso_ALS", "CombMoisture"],
        "CombClouds": ["VISCloudCov", "IRCloudCover"],
        "CldShadeOth": ["AreaMeso_ALS", "AreaMoDryAir", "CombClouds"],
        "InsInMt": ["CldShadeOth", "AMInstabMt"],
        "OutflowFrMt": ["InsInMt", "WndHodograph"],
        "Boundaries": ["WndHodograph", "OutflowFrMt", "MorningBound"],
        "CldShadeConv": ["InsInMt", "WndHodograph"],
        "CompPlFcst": ["AreaMeso_ALS", "CldShadeOth", "Boundaries", "CldShadeConv"],
        "CapChange": ["CompPlFcst"],
        "InsChange": ["CompPlFcst", "LoLevMoistAd"],
        "MountainFcst": ["InsInMt"],
        "Scenario": ["Date"],
        "ScenRelAMCIN": ["Scenario"],
        "AMCINInScen": ["ScenRelAMCIN", "MorningCIN"],
        "CapInScen": ["AMCINInScen", "CapChange"],
        "ScenRelAMIns": ["Scenario"],
        "AMInsWliScen": ["ScenRelAMIns", "LIfr12ZDENSd", "AMDewptCalPl"],
        "InsSclInScen": ["InsChange", "AMInsWliScen"],
        "ScenRel3_4": ["Scenario"],
        "CurPropConv": ["LatestCIN", "LLIW"],
        "ScnRelPlFcst": ["Scenario"],
        "PlainsFcst": ["CapInScen", "InsSclInScen", "CurPropConv", "ScnRelPlFcst"],
        "N34StarFcst": ["ScenRel3_4", "PlainsFcst"],
        "R5Fcst": ["MountainFcst", "N34StarFcst"],
        "Dewpoints": ["Scenario"],
        "LowLLapse": ["Scenario"],
        "MeanRH": ["Scenario"],
        "MidLLapse": ["Scenario"],
        "MvmtFeatures": ["Scenario"],
        "RHRatio": ["Scenario"],
        "SfcWndShfDis": ["Scenario"],
        "SynForcng": ["Scenario"],
        "TempDis": ["Scenario"],
        "WindAloft": ["Scenario"],
        "WindFieldMt": ["Scenario"],
        "WindFieldPln": ["Scenario"],
    }
    emit("hailfinder", variables, parents, seed=20240602)


def hepar2():
    s = lambda *names: list(names)
    pa = s("present", "absent")
    lvl3 = s("high", "normal", "low")
    lvl4 = s("very_high", "high", "normal", "low")
    variables = {
        # risk factors and history
        "alcoholism": pa, "vh_amn": pa, "hepatotoxic": pa, "hospital": pa,
        "surgery": pa, "injections": pa, "transfusion": pa,
        "sex": s("male", "female"),
        "age": s("age65_100", "age51_65", "age35_50", "age0_30"),
        "obesity": pa, "diabetes": pa, "Hyperbilirubinemia": pa,
        "gallstones": pa, "choledocholithotomy": pa,
        # disorders
        "THepatitis": pa,
        "ChHepatitis": s("active", "persistent", "absent"),
        "RHepatitis": pa,
        "Steatosis": pa,
        "PBC": pa,
        "fibrosis": pa,
        "Cirrhosis": s("decompensate", "compensate", "absent"),
        "carcinoma": pa,
        # findings
        "fatigue": pa, "bilirubin": lvl4, "itching": pa, "upper_pain": pa,
        "fat": pa, "pain_ruq": pa, "pressure_ruq": pa,
        "phosphatase": lvl3, "skin": pa, "ama": pa, "le_cells": pa,
        "joints": pa, "pain": pa, "proteins": lvl3, "edema": pa,
        "platelet": lvl4, "inr": lvl3, "bleeding": pa, "flatulence": pa,
        "encephalopathy": pa, "urea": lvl3, "ascites": pa,
        "hepatomegaly": pa, "hepatalgia": pa, "density": lvl3,
        "ESR": lvl3, "alt": lvl4, "ast": lvl4, "amylase": lvl3,
        "ggtp": lvl4, "cholesterol": lvl3, "hbsag": pa, "hbsag_anti": pa,
        "anorexia": pa, "nausea": pa, "spleen": pa, "consciousness": pa,
        "spiders": pa, "jaundice": pa, "albumin": lvl3, "edge": pa,
        "irregular_liver": pa, "hbc_anti": pa, "hcv_anti": pa,
        "palms": pa, "hbeag": pa, "triglycerides": lvl3,
        "alcohol": s("heavy", "moderate", "none"),
    }
    parents = {
        "gallstones": ["age", "sex", "obesity"],
        "choledocholithotomy": ["gallstones"],
        "THepatitis": ["hepatotoxic", "alcoholism"],
        "ChHepatitis": ["vh_amn", "hospital", "surgery", "injections",
                        "transfusion", "choledocholithotomy"],
        "RHepatitis": ["vh_amn", "injections"],
        "Steatosis": ["alcoholism", "obesity", "diabetes"],
        "PBC": ["age", "sex"],
        "fibrosis": ["ChHepatitis", "Steatosis"],
        "Cirrhosis": ["ChHepatitis", "alcoholism", "fibrosis"],
        "carcinoma": ["ChHepatitis", "Cirrhosis"],
        "fatigue": ["ChHepatitis", "RHepatitis"],
        "bilirubin": ["PBC", "gallstones", "Hyperbilirubinemia"],
        "itching": ["PBC", "gallstones", "Hyperbilirubinemia"],
        "upper_pain": ["gallstones", "choledocholithotomy"],
        "fat": ["gallstones", "Steatosis"],
        "pain_ruq": ["gallstones", "ChHepatitis"],
        "pressure_ruq": ["gallstones", "Steatosis"],
        "phosphatase": ["PBC", "gallstones", "ChHepatitis"],
        "skin": ["PBC", "Hyperbilirubinemia"],
        "ama": ["PBC"],
        "le_cells": ["PBC", "ChHepatitis"],
        "joints": ["PBC", "RHepatitis"],
        "pain": ["gallstones"],
        "proteins": ["PBC", "Cirrhosis"],
        "edema": ["Cirrhosis", "PBC"],
        "platelet": ["Cirrhosis", "PBC"],
        "inr": ["Cirrhosis", "ChHepatitis"],
        "bleeding": ["Cirrhosis", "PBC"],
        "flatulence": ["gallstones", "Steatosis"],
        "encephalopathy": ["Cirrhosis"],
        "urea": ["Cirrhosis"],
        "ascites": ["Cirrhosis"],
        "hepatomegaly": ["Steatosis", "THepatitis", "carcinoma"],
        "hepatalgia": ["THepatitis", "RHepatitis", "carcinoma"],
        "density": ["Steatosis", "Cirrhosis"],
        "ESR": ["PBC", "ChHepatitis", "RHepatitis"],
        "alt": ["ChHepatitis", "THepatitis", "RHepatitis", "Steatosis"],
        "ast": ["ChHepatitis", "THepatitis", "RHepatitis", "Cirrhosis"],
        "amylase": ["gallstones", "choledocholithotomy"],
        "ggtp": ["ChHepatitis", "THepatitis", "Steatosis", "gallstones"],
        "cholesterol": ["PBC", "Steatosis"],
        "hbsag": ["ChHepatitis"],
        "hbsag_anti": ["ChHepatitis"],
        "anorexia": ["THepatitis", "carcinoma"],
        "nausea": ["gallstones", "THepatitis"],
        "spleen": ["Cirrhosis", "PBC"],
        "consciousness": ["encephalopathy"],
        "spiders": ["Cirrhosis", "PBC"],
        "jaundice": ["Cirrhosis", "Hyperbilirubinemia", "gallstones"],
        "albumin": ["Cirrhosis", "PBC"],
        "edge": ["Cirrhosis", "Steatosis"],
        "irregular_liver": ["Cirrhosis", "carcinoma"],
        "hbc_anti": ["ChHepatitis"],
        "hcv_anti": ["ChHepatitis"],
        "palms": ["Cirrhosis"],
        "hbeag": ["hbsag"],
        "triglycerides": ["Steatosis", "diabetes", "obesity"],
        "alcohol": ["alcoholism"],
    }
    emit("hepar2", variables, parents, seed=20240603)


if __name__ == "__main__":
    DATA.mkdir(exist_ok=True)
    child()
    hailfinder()
    hepar2()
