# Independent oracle (networkx + numpy) for the mini-grid fixtures in data/mini_grid_expected.json.
# Usage: python3 tools/mini_grid_oracle.py data/mini_grid.csv > data/mini_grid_expected.json
import sys, csv, itertools, json, math
import numpy as np, networkx as nx
rows=[r for r in csv.reader(open(sys.argv[1] if len(sys.argv)>1 else 'data/mini_grid.csv')) if r and not r[0].startswith('%')][1:]
G=nx.Graph()
for a,b,r,x,*_ in rows:
    w=1/math.hypot(float(r),float(x)); a=int(a); b=int(b)
    G.add_edge(a,b,weight=G[a][b]['weight']+w if G.has_edge(a,b) else w)
def maxcut(g):
    nodes=sorted(g); idx={v:k for k,v in enumerate(nodes)}; best=0
    E=[(idx[u],idx[v],d['weight']) for u,v,d in g.edges(data=True)]
    for bits in range(1<<(len(nodes)-1)):
        c=sum(w for i,j,w in E if ((bits>>i)^(bits>>j))&1)
        best=max(best,c)
    return best
core=nx.k_core(G,2)
comps=sorted([core.subgraph(c).copy() for c in nx.connected_components(core)],key=lambda g:min(g))
removed=[(u,v,d['weight']) for u,v,d in G.edges(data=True) if not (core.has_node(u) and core.has_node(v))]
def p1_terms(g,gamma=0.4,beta=math.pi/8):
    nodes=sorted(g); n=len(nodes); idx={v:k for k,v in enumerate(nodes)}
    E=[(idx[u],idx[v],d['weight']) for u,v,d in g.edges(data=True)]
    zs=np.array([[1-2*((b>>k)&1) for k in range(n)] for b in range(1<<n)])
    C=sum(w*zs[:,i]*zs[:,j] for i,j,w in E)
    psi=np.exp(-1j*gamma*C)/math.sqrt(2**n)
    U=np.array([[math.cos(beta),-1j*math.sin(beta)],[-1j*math.sin(beta),math.cos(beta)]])
    psi=psi.reshape([2]*n)
    for k in range(n): psi=np.moveaxis(np.tensordot(U,psi,axes=([1],[n-1-k])),0,n-1-k)
    p=np.abs(psi.reshape(-1))**2
    cnt=0
    for i,j in itertools.combinations(range(n),2):
        if abs(np.dot(p,zs[:,i]*zs[:,j]))>=1e-12: cnt+=1
    dist2=sum(1 for i,j in itertools.combinations(nodes,2) if nx.shortest_path_length(g,i,j)<=2)
    return cnt,dist2
out={"raw_vertices":G.number_of_nodes(),"raw_terms":G.number_of_edges(),"parallel_lines":1,
 "pruned_vertices":core.number_of_nodes(),"pruned_terms":core.number_of_edges(),
 "components":[], "removed":len(removed),"removed_weight":sum(w for *_,w in removed),
 "raw_max_cut":maxcut(G)}
for c in comps:
    t,d2=p1_terms(c)
    out["components"].append({"vertices":c.number_of_nodes(),"terms":c.number_of_edges(),"max_cut":maxcut(c),"p1_terms":t,"pairs_within_2":d2})
out["core_max_cut_plus_removed"]=sum(c["max_cut"] for c in out["components"])+out["removed_weight"]
print(json.dumps(out,indent=2))
